#pragma once

// Time-domain execution of discrete controllers: the difference-equation
// recursion, steady-state sine measurement, harmonic analysis, and an
// average-model grid-tied inverter with PI(+QR) current control.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbt/controllers.hpp"

namespace sbt {

struct DiffEqState {
  double vin1 = 0.0, vin2 = 0.0;
  double vout1 = 0.0, vout2 = 0.0;
};

inline constexpr double kOverflowLimit = 1e12;

class DifferenceEquation {
 public:
  explicit DifferenceEquation(const DiffEqCoeffs& c) : c_(c) {}

  double step(double vin) {
    const double vout = c_.kin0 * vin + c_.kin1 * s_.vin1 + c_.kin2 * s_.vin2 + c_.kout1 * s_.vout1 +
                        c_.kout2 * s_.vout2;
    s_.vin2 = s_.vin1;
    s_.vin1 = vin;
    s_.vout2 = s_.vout1;
    s_.vout1 = vout;
    return vout;
  }

  void reset() { s_ = {}; }
  const DiffEqState& state() const { return s_; }
  const DiffEqCoeffs& coeffs() const { return c_; }

 private:
  DiffEqCoeffs c_;
  DiffEqState s_;
};

/// Zero-state response. Throws NumericOverflow once |output| exceeds kOverflowLimit.
std::vector<double> run_difference_equation(const DiffEqCoeffs& coeffs, std::span<const double> input);

/// Series connection of several recursions.
std::vector<double> run_cascade(std::span<const DiffEqCoeffs> cascade, std::span<const double> input);

/// amp * sin(2 pi f n / fs), n = 0..n_samples-1.
std::vector<double> sine_wave(double f, double fs, double amp, std::size_t n_samples);

struct SineTestResult {
  double amplitude;
  double phase_deg;  // relative to a sine starting at phase 0
  double residual;   // non-fundamental share of the window energy
};

/// Least-squares projection of a window onto sin/cos at f. Over an integer
/// number of cycles this equals the single-bin DFT.
SineTestResult project_sinusoid(std::span<const double> samples, double f, double fs, std::size_t start_index = 0);

/// Drives the cascade with a sine from rest, discards settle_cycles, and
/// measures over measure_cycles. Throws NotSettled when the two halves of the
/// measurement window disagree by more than 0.1 % in amplitude.
SineTestResult sine_steady_state(std::span<const DiffEqCoeffs> cascade, double f, double fs, double amp,
                                 int settle_cycles = 300, int measure_cycles = 50);
SineTestResult sine_steady_state(const DiffEqCoeffs& coeffs, double f, double fs, double amp,
                                 int settle_cycles = 300, int measure_cycles = 50);

/// Settle length (in cycles of f) after which the slowest mode of the cascade
/// has decayed below `residual`; never less than 300.
int recommended_settle_cycles(std::span<const DiffEqCoeffs> cascade, double f, double fs, double residual = 1e-7);

/// Total harmonic distortion in percent over a window spanning an integer
/// number (>= 10) of fundamental periods.
double thd(std::span<const double> samples, double f0, double fs, int max_harmonic = 50);

struct InverterConfig {
  double inductance = 245e-6;    // H
  double capacitance = 22e-6;    // F, used only with filter_capacitor
  bool filter_capacitor = false;
  double fs_ctrl = 40000.0;      // Hz
  double f_grid = 50.0;          // Hz
  double v_grid_rms = 220.0;     // V
  double harmonic_f = 950.0;     // Hz
  double harmonic_amplitude = 100.0;  // V peak
  double i_ref_amplitude = 30.0;      // A peak
  int delay_samples = 1;
  double duration = 2.0;         // s
  double initial_current = 0.0;  // A

  void validate() const;
};

/// PI in parallel with an optional QR, both as difference equations.
struct PirController {
  std::string label;
  DiffEqCoeffs pi;
  std::optional<DiffEqCoeffs> qr;
};

/// PI discretized with Tustin; QR (when given) with `qr_method`.
PirController make_pir_controller(const PiParams& pi, const std::optional<QrParams>& qr,
                                  const std::optional<Method>& qr_method, double sample_time);

struct SimTrace {
  std::vector<double> t;
  std::vector<double> i_grid;
  std::vector<double> v_grid;
  std::vector<double> v_inv;
};

/// Average-model L-filter inverter against a distorted stiff grid, integrated
/// with forward Euler at the control rate.
SimTrace inverter_closed_loop(const InverterConfig& cfg, const PirController& controller);

/// THD of i_grid over the last `window_cycles` grid periods.
double trace_thd(const SimTrace& trace, const InverterConfig& cfg, int window_cycles = 10, int max_harmonic = 50);

}  // namespace sbt

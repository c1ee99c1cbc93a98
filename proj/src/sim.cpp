#include "sbt/sim.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <deque>
#include <numbers>

#include "sbt/lti_core.hpp"

namespace sbt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_overflow(double v) {
  if (!std::isfinite(v) || std::abs(v) > kOverflowLimit)
    throw NumericOverflow("output magnitude exceeded 1e12; the recursion is unstable");
}

std::size_t cycles_to_samples(double cycles, double f, double fs) {
  return static_cast<std::size_t>(std::llround(cycles * fs / f));
}

}  // namespace

std::vector<double> run_difference_equation(const DiffEqCoeffs& coeffs, std::span<const double> input) {
  DifferenceEquation eq(coeffs);
  std::vector<double> out;
  out.reserve(input.size());
  for (double x : input) {
    const double y = eq.step(x);
    check_overflow(y);
    out.push_back(y);
  }
  return out;
}

std::vector<double> run_cascade(std::span<const DiffEqCoeffs> cascade, std::span<const double> input) {
  std::vector<double> signal(input.begin(), input.end());
  for (const DiffEqCoeffs& c : cascade) signal = run_difference_equation(c, signal);
  return signal;
}

std::vector<double> sine_wave(double f, double fs, double amp, std::size_t n_samples) {
  std::vector<double> x(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) x[n] = amp * std::sin(kTwoPi * f * static_cast<double>(n) / fs);
  return x;
}

SineTestResult project_sinusoid(std::span<const double> samples, double f, double fs, std::size_t start_index) {
  if (samples.empty()) throw EmptyInput("no samples to project");
  Eigen::Matrix2d gram = Eigen::Matrix2d::Zero();
  Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
  double energy = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double th = kTwoPi * f * static_cast<double>(start_index + i) / fs;
    const Eigen::Vector2d basis(std::sin(th), std::cos(th));
    gram += basis * basis.transpose();
    rhs += basis * samples[i];
    energy += samples[i] * samples[i];
  }
  if (energy == 0.0) return {0.0, 0.0, 0.0};
  const Eigen::Vector2d c = gram.ldlt().solve(rhs);
  double res = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double th = kTwoPi * f * static_cast<double>(start_index + i) / fs;
    const double e = samples[i] - (c[0] * std::sin(th) + c[1] * std::cos(th));
    res += e * e;
  }
  return {std::hypot(c[0], c[1]), std::atan2(c[1], c[0]) * 180.0 / std::numbers::pi, res / energy};
}

SineTestResult sine_steady_state(std::span<const DiffEqCoeffs> cascade, double f, double fs, double amp,
                                 int settle_cycles, int measure_cycles) {
  if (!(f > 0.0) || !(f < 0.5 * fs)) throw DomainError("test frequency must lie in (0, fs/2)");
  if (settle_cycles < 0 || measure_cycles < 2) throw ParamError("need settle_cycles >= 0 and measure_cycles >= 2");
  const std::size_t n_settle = cycles_to_samples(settle_cycles, f, fs);
  const std::size_t n_measure = cycles_to_samples(measure_cycles, f, fs);
  const std::vector<double> y = run_cascade(cascade, sine_wave(f, fs, amp, n_settle + n_measure));

  const std::span<const double> window(y.data() + n_settle, n_measure);
  const SineTestResult full = project_sinusoid(window, f, fs, n_settle);
  const std::size_t half = n_measure / 2;
  const SineTestResult first = project_sinusoid(window.first(half), f, fs, n_settle);
  const SineTestResult second = project_sinusoid(window.subspan(half), f, fs, n_settle + half);
  const double scale = std::max(first.amplitude, second.amplitude);
  if (scale > 0.0 && std::abs(first.amplitude - second.amplitude) > 1e-3 * scale)
    throw NotSettled("amplitude still drifting across the measurement window");
  return full;
}

SineTestResult sine_steady_state(const DiffEqCoeffs& coeffs, double f, double fs, double amp, int settle_cycles,
                                 int measure_cycles) {
  return sine_steady_state(std::span<const DiffEqCoeffs>(&coeffs, 1), f, fs, amp, settle_cycles, measure_cycles);
}

int recommended_settle_cycles(std::span<const DiffEqCoeffs> cascade, double f, double fs, double residual) {
  double slowest = 0.0;
  for (const DiffEqCoeffs& c : cascade)
    for (const auto& r : quadratic_roots(Polynomiald{-c.kout2, -c.kout1, 1.0})) slowest = std::max(slowest, std::abs(r));
  constexpr int kMinimum = 300;
  if (slowest <= 0.0 || slowest >= 1.0) return kMinimum;
  const double samples = std::log(residual) / std::log(slowest);
  return std::max(kMinimum, static_cast<int>(std::ceil(samples * f / fs)));
}

double thd(std::span<const double> samples, double f0, double fs, int max_harmonic) {
  if (max_harmonic < 2) throw ParamError("max_harmonic must be >= 2");
  if (!(max_harmonic * f0 < 0.5 * fs)) throw DomainError("highest harmonic exceeds the Nyquist frequency");
  const double cycles = static_cast<double>(samples.size()) * f0 / fs;
  if (std::abs(cycles - std::round(cycles)) > 1e-6 || std::round(cycles) < 10.0)
    throw WindowError("THD window must span an integer number (>= 10) of fundamental periods");

  const double n = static_cast<double>(samples.size());
  auto bin = [&](int h) {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double th = kTwoPi * h * f0 * static_cast<double>(k) / fs;
      re += samples[k] * std::cos(th);
      im -= samples[k] * std::sin(th);
    }
    return 2.0 * std::hypot(re, im) / n;
  };
  const double fundamental = bin(1);
  if (!(fundamental > 0.0)) throw DomainError("fundamental component is zero; THD undefined");
  double harm2 = 0.0;
  for (int h = 2; h <= max_harmonic; ++h) {
    const double m = bin(h);
    harm2 += m * m;
  }
  return 100.0 * std::sqrt(harm2) / fundamental;
}

void InverterConfig::validate() const {
  if (!(inductance > 0.0)) throw ParamError("inductance must be > 0");
  if (filter_capacitor && !(capacitance > 0.0)) throw ParamError("capacitance must be > 0");
  if (!(fs_ctrl > 2.0 * harmonic_f)) throw ParamError("control rate must exceed twice the harmonic frequency");
  if (!(f_grid > 0.0)) throw ParamError("grid frequency must be > 0");
  if (delay_samples < 0) throw ParamError("delay_samples must be >= 0");
  if (!(duration * f_grid >= 20.0)) throw ParamError("duration must cover at least 20 grid cycles");
}

PirController make_pir_controller(const PiParams& pi, const std::optional<QrParams>& qr,
                                  const std::optional<Method>& qr_method, double sample_time) {
  PirController c{"pi", diff_eq_coeffs(pi_discretize_tustin(pi, sample_time)), std::nullopt};
  if (qr) {
    if (!qr_method) throw ParamError("a QR term needs a discretization method");
    c.qr = diff_eq_coeffs(qr_discretize(*qr, *qr_method, sample_time));
    c.label = method_name(*qr_method);
  }
  return c;
}

SimTrace inverter_closed_loop(const InverterConfig& cfg, const PirController& controller) {
  cfg.validate();
  const double dt = 1.0 / cfg.fs_ctrl;
  const auto n = static_cast<std::size_t>(std::llround(cfg.duration * cfg.fs_ctrl));
  const double v_peak = std::sqrt(2.0) * cfg.v_grid_rms;
  const double wg = kTwoPi * cfg.f_grid;
  const double wh = kTwoPi * cfg.harmonic_f;

  DifferenceEquation pi(controller.pi);
  std::optional<DifferenceEquation> qr;
  if (controller.qr) qr.emplace(*controller.qr);
  std::deque<double> pending(static_cast<std::size_t>(cfg.delay_samples), 0.0);

  SimTrace tr;
  tr.t.reserve(n);
  tr.i_grid.reserve(n);
  tr.v_grid.reserve(n);
  tr.v_inv.reserve(n);

  // With the filter capacitor the inductor current also feeds C dv/dt.
  auto cap_current = [&](double t) {
    return cfg.filter_capacitor
               ? cfg.capacitance * (v_peak * wg * std::cos(wg * t) + cfg.harmonic_amplitude * wh * std::cos(wh * t))
               : 0.0;
  };

  double i_l = cfg.initial_current + cap_current(0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double v_fund = v_peak * std::sin(wg * t);
    const double v_grid = v_fund + cfg.harmonic_amplitude * std::sin(wh * t);
    const double i_grid = i_l - cap_current(t);
    const double err = cfg.i_ref_amplitude * std::sin(wg * t) - i_grid;

    double u = pi.step(err);
    if (qr) u += qr->step(err);
    pending.push_back(u);
    const double u_applied = pending.front();
    pending.pop_front();
    // Ideal PLL: the feedforward is the fundamental at the instant of application.
    const double v_inv = u_applied + v_fund;

    tr.t.push_back(t);
    tr.i_grid.push_back(i_grid);
    tr.v_grid.push_back(v_grid);
    tr.v_inv.push_back(v_inv);

    i_l += dt / cfg.inductance * (v_inv - v_grid);
    if (!std::isfinite(i_l) || std::abs(i_l) > kOverflowLimit)
      throw NumericOverflow("inverter current diverged with controller '" + controller.label + "'");
  }
  return tr;
}

double trace_thd(const SimTrace& trace, const InverterConfig& cfg, int window_cycles, int max_harmonic) {
  const auto per = static_cast<std::size_t>(std::llround(cfg.fs_ctrl / cfg.f_grid));
  if (std::abs(cfg.fs_ctrl / cfg.f_grid - static_cast<double>(per)) > 1e-9)
    throw WindowError("control rate is not an integer multiple of the grid frequency");
  const std::size_t len = per * static_cast<std::size_t>(window_cycles);
  if (len > trace.i_grid.size()) throw WindowError("trace shorter than the THD window");
  const std::span<const double> tail(trace.i_grid.data() + trace.i_grid.size() - len, len);
  return thd(tail, cfg.f_grid, cfg.fs_ctrl, max_harmonic);
}

}  // namespace sbt

#pragma once

// Frequency-domain comparison of analog and discrete controllers, and the
// pole-mapping diagnostics (original pole -> mapped z pole -> equivalent s pole).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbt/controllers.hpp"
#include "sbt/lti_core.hpp"
#include "sbt/transforms.hpp"

namespace sbt {

class FrequencyGrid {
 public:
  enum class Spacing { linear, logarithmic, explicit_points };

  static FrequencyGrid linear(double f_lo, double f_hi, int n);
  static FrequencyGrid logarithmic(double f_lo, double f_hi, int n);
  /// Points are sorted and exact duplicates dropped; they must be positive and finite.
  static FrequencyGrid explicit_points(std::vector<double> hz);
  /// Union of two grids, sorted, exact duplicates removed.
  static FrequencyGrid merge(const FrequencyGrid& a, const FrequencyGrid& b);

  const std::vector<double>& hz() const { return hz_; }
  Spacing spacing() const { return spacing_; }
  std::size_t size() const { return hz_.size(); }

  /// Throws DomainError when a point is outside (0, fs/2).
  void check_below_nyquist(double sample_time) const;

 private:
  FrequencyGrid(std::vector<double> hz, Spacing spacing);

  std::vector<double> hz_;
  Spacing spacing_;
};

/// 201 linearly spaced points over f_center +/- half_width.
FrequencyGrid resonance_grid(double f_center_hz, double half_width_hz = 50.0, int n = 201);

/// Near-resonance grid used for RMSE scoring and as the default loss grid:
/// 900..1000 Hz in 0.5 Hz steps.
FrequencyGrid default_grid();

/// 2000 log points over 10 Hz..9.5 kHz merged with 200 linear points over 900..1000 Hz.
FrequencyGrid wide_grid();

struct ResponsePoint {
  double f_hz;
  double mag_db;
  double phase_deg;  // wrapped to (-180, 180]
  bool pole_hit = false;
};

struct ErrorPoint {
  double f_hz;
  double err_db;
  bool pole_hit = false;
};

/// H at frequency f: s = j 2 pi f for continuous, z = e^{j 2 pi f T} for discrete.
ComplexPoint response_at(const RationalTransferd& tf, double f_hz);

std::vector<ResponsePoint> freq_response(const RationalTransferd& tf, const FrequencyGrid& grid);

/// err_db(f) = analog dB - discrete dB.
std::vector<ErrorPoint> magnitude_error_curve(const RationalTransferd& analog, const RationalTransferd& discrete,
                                              const FrequencyGrid& grid);

/// reference dB - other dB for any pair of domains.
std::vector<ErrorPoint> magnitude_difference(const RationalTransferd& reference, const RationalTransferd& other,
                                             const FrequencyGrid& grid);

double rmse(std::span<const double> errs);

enum class ErrorScale { db, linear };

/// RMSE of the analog-minus-discrete magnitude difference over a grid.
double magnitude_rmse(const RationalTransferd& analog, const RationalTransferd& discrete, const FrequencyGrid& grid,
                      ErrorScale scale = ErrorScale::db);

struct Peak {
  double f_hz;
  double mag_db;
};

/// Magnitude maximum over [f_lo, f_hi]: dense scan then golden-section polish.
Peak find_peak(const RationalTransferd& tf, double f_lo, double f_hi, int scan_points = 4001);

struct SourcePoles {
  ComplexPoint original;   // (-wc, sqrt(wn^2 - wc^2))
  ComplexPoint prewarped;  // (-wc, sqrt((K_pw wn)^2 - wc^2))
};

SourcePoles source_poles(const QrParams& p, double sample_time);

/// A row of the pole map. `method` is empty for the exact reference row.
struct PoleMapRecord {
  std::optional<Method> method;
  ComplexPoint mapped_z;      // analytic image of the source pole
  ComplexPoint root_z;        // upper root of the discretized denominator
  ComplexPoint equivalent_s;  // equivalent_s_of_z(mapped_z)

  std::string label() const;
};

inline constexpr double kPoleMapPathTolerance = 1e-9;

/// Exact reference row first, then one row per method. Each mapped pole is
/// computed twice (analytic map and denominator roots); a disagreement beyond
/// kPoleMapPathTolerance raises ConsistencyError.
std::vector<PoleMapRecord> pole_map_table(const QrParams& p, double sample_time, std::span<const Method> methods);

}  // namespace sbt

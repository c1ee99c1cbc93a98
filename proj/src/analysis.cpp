#include "sbt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sbt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double to_db(double mag) { return 20.0 * std::log10(mag); }

double wrap_phase_deg(double rad) {
  double deg = rad * 180.0 / std::numbers::pi;
  if (deg <= -180.0) deg += 360.0;
  return deg;
}

}  // namespace

FrequencyGrid::FrequencyGrid(std::vector<double> hz, Spacing spacing) : hz_(std::move(hz)), spacing_(spacing) {
  if (hz_.empty()) throw EmptyInput("frequency grid has no points");
  for (std::size_t i = 0; i < hz_.size(); ++i) {
    if (!(hz_[i] > 0.0) || !std::isfinite(hz_[i])) throw ParamError("grid frequencies must be positive and finite");
    if (i > 0 && !(hz_[i] > hz_[i - 1])) throw ParamError("grid frequencies must be strictly increasing");
  }
}

FrequencyGrid FrequencyGrid::linear(double f_lo, double f_hi, int n) {
  if (n < 1) throw ParamError("grid needs at least one point");
  if (n == 1) return FrequencyGrid({f_lo}, Spacing::linear);
  if (!(f_hi > f_lo)) throw ParamError("grid upper bound must exceed the lower bound");
  std::vector<double> hz(n);
  const double step = (f_hi - f_lo) / (n - 1);
  for (int i = 0; i < n; ++i) hz[i] = f_lo + step * i;
  hz.back() = f_hi;
  return FrequencyGrid(std::move(hz), Spacing::linear);
}

FrequencyGrid FrequencyGrid::logarithmic(double f_lo, double f_hi, int n) {
  if (n < 2) throw ParamError("logarithmic grid needs at least two points");
  if (!(f_lo > 0.0) || !(f_hi > f_lo)) throw ParamError("logarithmic grid needs 0 < f_lo < f_hi");
  std::vector<double> hz(n);
  const double l0 = std::log10(f_lo);
  const double step = (std::log10(f_hi) - l0) / (n - 1);
  for (int i = 0; i < n; ++i) hz[i] = std::pow(10.0, l0 + step * i);
  hz.front() = f_lo;
  hz.back() = f_hi;
  return FrequencyGrid(std::move(hz), Spacing::logarithmic);
}

FrequencyGrid FrequencyGrid::explicit_points(std::vector<double> hz) {
  std::sort(hz.begin(), hz.end());
  hz.erase(std::unique(hz.begin(), hz.end()), hz.end());
  return FrequencyGrid(std::move(hz), Spacing::explicit_points);
}

FrequencyGrid FrequencyGrid::merge(const FrequencyGrid& a, const FrequencyGrid& b) {
  std::vector<double> hz = a.hz_;
  hz.insert(hz.end(), b.hz_.begin(), b.hz_.end());
  return explicit_points(std::move(hz));
}

void FrequencyGrid::check_below_nyquist(double sample_time) const {
  const double nyquist = 0.5 / sample_time;
  if (hz_.back() >= nyquist) throw DomainError("grid reaches the Nyquist frequency of the discrete system");
}

FrequencyGrid resonance_grid(double f_center_hz, double half_width_hz, int n) {
  return FrequencyGrid::linear(f_center_hz - half_width_hz, f_center_hz + half_width_hz, n);
}

FrequencyGrid default_grid() { return resonance_grid(950.0, 50.0, 201); }

FrequencyGrid wide_grid() {
  return FrequencyGrid::merge(FrequencyGrid::logarithmic(10.0, 9500.0, 2000), FrequencyGrid::linear(900.0, 1000.0, 200));
}

ComplexPoint response_at(const RationalTransferd& tf, double f_hz) {
  const double w = kTwoPi * f_hz;
  if (tf.domain().is_continuous()) return tf_eval(tf, ComplexPoint(0.0, w));
  const double th = w * tf.domain().sample_time();
  return tf_eval(tf, ComplexPoint(std::cos(th), std::sin(th)));
}

std::vector<ResponsePoint> freq_response(const RationalTransferd& tf, const FrequencyGrid& grid) {
  if (tf.domain().is_discrete()) grid.check_below_nyquist(tf.domain().sample_time());
  std::vector<ResponsePoint> out;
  out.reserve(grid.size());
  for (double f : grid.hz()) {
    try {
      const ComplexPoint h = response_at(tf, f);
      out.push_back({f, to_db(std::abs(h)), wrap_phase_deg(std::arg(h))});
    } catch (const PoleHit&) {
      out.push_back({f, std::numeric_limits<double>::infinity(), 0.0, true});
    }
  }
  return out;
}

std::vector<ErrorPoint> magnitude_difference(const RationalTransferd& reference, const RationalTransferd& other,
                                             const FrequencyGrid& grid) {
  const auto ra = freq_response(reference, grid);
  const auto rd = freq_response(other, grid);
  std::vector<ErrorPoint> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool hit = ra[i].pole_hit || rd[i].pole_hit;
    out.push_back({ra[i].f_hz, hit ? std::numeric_limits<double>::quiet_NaN() : ra[i].mag_db - rd[i].mag_db, hit});
  }
  return out;
}

std::vector<ErrorPoint> magnitude_error_curve(const RationalTransferd& analog, const RationalTransferd& discrete,
                                              const FrequencyGrid& grid) {
  if (!analog.domain().is_continuous()) throw DomainMismatch("analog reference must be continuous");
  if (!discrete.domain().is_discrete()) throw DomainMismatch("compared system must be discrete");
  return magnitude_difference(analog, discrete, grid);
}

double rmse(std::span<const double> errs) {
  if (errs.empty()) throw EmptyInput("rmse of an empty list");
  double acc = 0.0;
  for (double e : errs) acc += e * e;
  return std::sqrt(acc / static_cast<double>(errs.size()));
}

double magnitude_rmse(const RationalTransferd& analog, const RationalTransferd& discrete, const FrequencyGrid& grid,
                      ErrorScale scale) {
  std::vector<double> errs;
  errs.reserve(grid.size());
  if (scale == ErrorScale::db) {
    for (const auto& p : magnitude_error_curve(analog, discrete, grid)) {
      if (p.pole_hit) throw PoleHit("magnitude error undefined at a pole");
      errs.push_back(p.err_db);
    }
  } else {
    if (discrete.domain().is_discrete()) grid.check_below_nyquist(discrete.domain().sample_time());
    for (double f : grid.hz()) errs.push_back(std::abs(response_at(analog, f)) - std::abs(response_at(discrete, f)));
  }
  return rmse(errs);
}

Peak find_peak(const RationalTransferd& tf, double f_lo, double f_hi, int scan_points) {
  if (scan_points < 3 || !(f_hi > f_lo)) throw ParamError("peak search needs a non-empty band and >= 3 points");
  auto mag = [&](double f) { return std::abs(response_at(tf, f)); };
  const double step = (f_hi - f_lo) / (scan_points - 1);
  int best = 0;
  double best_mag = -1.0;
  for (int i = 0; i < scan_points; ++i) {
    const double m = mag(f_lo + step * i);
    if (m > best_mag) {
      best_mag = m;
      best = i;
    }
  }
  double lo = f_lo + step * std::max(best - 1, 0);
  double hi = f_lo + step * std::min(best + 1, scan_points - 1);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double m1 = mag(x1);
  double m2 = mag(x2);
  for (int it = 0; it < 80; ++it) {
    if (m1 > m2) {
      hi = x2;
      x2 = x1;
      m2 = m1;
      x1 = hi - ratio * (hi - lo);
      m1 = mag(x1);
    } else {
      lo = x1;
      x1 = x2;
      m1 = m2;
      x2 = lo + ratio * (hi - lo);
      m2 = mag(x2);
    }
  }
  const double f = 0.5 * (lo + hi);
  const double m = mag(f);
  if (m < best_mag) return {f_lo + step * best, to_db(best_mag)};
  return {f, to_db(m)};
}

SourcePoles source_poles(const QrParams& p, double sample_time) {
  p.validate();
  const double orig2 = p.omega_n * p.omega_n - p.omega_c * p.omega_c;
  const double wpw = prewarp_factor(p.omega_n, sample_time) * p.omega_n;
  const double pw2 = wpw * wpw - p.omega_c * p.omega_c;
  if (!(orig2 > 0.0) || !(pw2 > 0.0)) throw DomainError("resonant poles are not complex (radicand <= 0)");
  return {{-p.omega_c, std::sqrt(orig2)}, {-p.omega_c, std::sqrt(pw2)}};
}

std::string PoleMapRecord::label() const { return method ? method_name(*method) : "exact"; }

namespace {

ComplexPoint upper_root(const Polynomiald& den) {
  const auto roots = quadratic_roots(den);
  return roots[0];
}

void check_paths(const ComplexPoint& analytic, const ComplexPoint& roots, const std::string& label) {
  if (std::abs(analytic - roots) > kPoleMapPathTolerance * std::max(1.0, std::abs(analytic)))
    throw ConsistencyError("analytic pole map and denominator roots disagree for " + label);
}

}  // namespace

std::vector<PoleMapRecord> pole_map_table(const QrParams& p, double sample_time, std::span<const Method> methods) {
  const SourcePoles poles = source_poles(p, sample_time);
  std::vector<PoleMapRecord> rows;
  rows.reserve(methods.size() + 1);

  {
    const ComplexPoint z = exact_z_of_s(poles.original, sample_time);
    // Matched-pole denominator z^2 - 2 e^{sigma T} cos(w T) z + e^{2 sigma T}.
    const double r = std::exp(poles.original.real() * sample_time);
    const Polynomiald den{r * r, -2.0 * r * std::cos(poles.original.imag() * sample_time), 1.0};
    const ComplexPoint zr = upper_root(den);
    check_paths(z, zr, "exact");
    rows.push_back({std::nullopt, z, zr, equivalent_s_of_z(z, sample_time)});
  }

  for (const Method& m : methods) {
    ComplexPoint z;
    if (const auto* pw = std::get_if<method::TustinPrewarp>(&m)) {
      const double wpw = prewarp_factor(pw->omega_n, sample_time) * p.omega_n;
      const double rad = wpw * wpw - p.omega_c * p.omega_c;
      if (!(rad > 0.0)) throw DomainError("pre-warped resonant poles are not complex");
      z = sbt_z_of_s({-p.omega_c, std::sqrt(rad)}, SbtParams(0.5, 1.0), sample_time);
    } else {
      z = sbt_z_of_s(poles.original, to_sbt_params(m, sample_time), sample_time);
    }
    const BiquadCoeffs c = qr_discretize(p, m, sample_time);
    const ComplexPoint zr = upper_root(Polynomiald{c.b0, c.b1, c.b2});
    check_paths(z, zr, method_name(m));
    rows.push_back({m, z, zr, equivalent_s_of_z(z, sample_time)});
  }
  return rows;
}

}  // namespace sbt

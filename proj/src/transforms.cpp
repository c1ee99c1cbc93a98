#include "sbt/transforms.hpp"

#include <cmath>
#include <numbers>

namespace sbt {

SbtParams::SbtParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParamError("shape factor alpha must lie in [0, 1]");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParamError("time factor beta must be finite and > 0");
}

std::string method_name(const Method& m) {
  struct {
    std::string operator()(const method::Euler&) const { return "euler"; }
    std::string operator()(const method::Tustin&) const { return "tustin"; }
    std::string operator()(const method::TustinPrewarp&) const { return "sota"; }
    std::string operator()(const method::Sbt&) const { return "sbt"; }
  } visitor;
  return std::visit(visitor, m);
}

SbtParams to_sbt_params(const Method& m, double sample_time) {
  struct {
    double T;
    SbtParams operator()(const method::Euler&) const { return {1.0, 1.0}; }
    SbtParams operator()(const method::Tustin&) const { return {0.5, 1.0}; }
    SbtParams operator()(const method::TustinPrewarp& p) const { return {0.5, prewarp_factor(p.omega_n, T)}; }
    SbtParams operator()(const method::Sbt& p) const { return p.params; }
  } visitor{sample_time};
  return std::visit(visitor, m);
}

ComplexPoint sbt_z_of_s(ComplexPoint s, const SbtParams& p, double sample_time) {
  const double scaled_t = p.beta() * sample_time;
  const ComplexPoint den = 1.0 - p.alpha() * scaled_t * s;
  if (std::abs(den) < kMapSingularityTolerance) throw MapSingularity("s sits on the pole of the inverse SBT");
  return (1.0 + (1.0 - p.alpha()) * scaled_t * s) / den;
}

ComplexPoint sbt_s_of_z(ComplexPoint z, const SbtParams& p, double sample_time) {
  const double a = p.alpha();
  const double gamma = z.real();
  const double zeta = z.imag();
  const double den_re = a * gamma + 1.0 - a;
  const double den_im = a * zeta;
  const double mag2 = den_re * den_re + den_im * den_im;
  if (std::sqrt(mag2) < kMapSingularityTolerance) throw MapSingularity("alpha*z + 1 - alpha vanishes");
  const double scale = 1.0 / (p.beta() * sample_time * mag2);
  const double sigma = scale * (a * (gamma - 1.0) * (gamma - 1.0) + gamma - 1.0 + a * zeta * zeta);
  const double omega = scale * zeta;
  return {sigma, omega};
}

ComplexPoint exact_z_of_s(ComplexPoint s, double sample_time) {
  const double r = std::exp(s.real() * sample_time);
  const double th = s.imag() * sample_time;
  return {r * std::cos(th), r * std::sin(th)};
}

ComplexPoint equivalent_s_of_z(ComplexPoint z, double sample_time) {
  if (z == ComplexPoint(0.0, 0.0)) throw OriginError("ln(z) undefined at z = 0");
  return {std::log(std::abs(z)) / sample_time, std::atan2(z.imag(), z.real()) / sample_time};
}

double prewarp_factor(double omega_n, double sample_time) {
  if (!(omega_n > 0.0)) throw DomainError("pre-warp frequency must be > 0");
  const double half = 0.5 * omega_n * sample_time;
  if (!(half < 0.5 * std::numbers::pi)) throw DomainError("omega_n*T/2 reaches the tangent singularity at pi/2");
  return std::tan(half) / half;
}

StabilityCircle stability_circle(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("stability circle needs alpha > 0");
  const double r = 1.0 / (2.0 * alpha);
  return {1.0 - r, r};
}

bool is_stable_image(ComplexPoint z, double alpha) {
  const StabilityCircle c = stability_circle(alpha);
  const double dx = z.real() - c.center_re;
  const double dy = z.imag();
  return dx * dx + dy * dy <= c.radius * c.radius;
}

RationalTransferd substitute(const RationalTransferd& tf, const SbtParams& p, double sample_time) {
  if (!tf.domain().is_continuous()) throw DomainMismatch("substitute expects a continuous transfer function");
  const Domain target = Domain::discrete(sample_time);
  const int n = static_cast<int>(std::max(tf.num().degree(), tf.den().degree()));
  const double scaled_t = p.beta() * sample_time;

  // Integer-power binomials, convolved directly.
  const Polynomiald forward{-1.0, 1.0};                 // z - 1
  const Polynomiald weight{1.0 - p.alpha(), p.alpha()};  // alpha*z + 1 - alpha

  auto compose = [&](const Polynomiald& poly) {
    Polynomiald out;
    for (int k = 0; k <= n; ++k) {
      const double c = poly[k];
      if (c == 0.0) continue;
      const double gain = c * std::pow(scaled_t, n - k);
      out = out + gain * (pow(forward, k) * pow(weight, n - k));
    }
    return out;
  };
  return RationalTransferd(compose(tf.num()), compose(tf.den()), target);
}

RationalTransferd substitute(const RationalTransferd& tf, const Method& m, double sample_time) {
  return substitute(tf, to_sbt_params(m, sample_time), sample_time);
}

}  // namespace sbt

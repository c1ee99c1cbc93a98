#pragma once

// The scalable bilinear transformation
//
//     s = 1/(beta*T) * (z - 1) / (alpha*z + 1 - alpha)
//
// with shape factor alpha (share of the backward rectangle in the hexagonal
// integration area) and time factor beta (T' = beta*T). Euler, Tustin and
// pre-warped Tustin are the special cases (1,1), (0.5,1) and (0.5,K_pw).

#include <string>
#include <variant>

#include "sbt/lti_core.hpp"

namespace sbt {

class SbtParams {
 public:
  /// Throws ParamError unless 0 <= alpha <= 1 and beta > 0.
  SbtParams(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  /// alpha in [0.5, 1]: the left half plane lands inside the unit disk.
  bool in_stable_range() const { return is_stable_alpha(alpha_); }
  static bool is_stable_alpha(double alpha) { return alpha >= 0.5 && alpha <= 1.0; }

  friend bool operator==(const SbtParams&, const SbtParams&) = default;

 private:
  double alpha_;
  double beta_;
};

namespace method {
struct Euler {};
struct Tustin {};
/// Tustin with the design frequency pre-warped to omega_n (rad/s).
struct TustinPrewarp {
  double omega_n;
};
struct Sbt {
  SbtParams params;
};
}  // namespace method

using Method = std::variant<method::Euler, method::Tustin, method::TustinPrewarp, method::Sbt>;

std::string method_name(const Method& m);

/// SBT parameters equivalent to a method for generic substitution.
SbtParams to_sbt_params(const Method& m, double sample_time);

struct StabilityCircle {
  double center_re;
  double radius;
};

inline constexpr double kMapSingularityTolerance = 1e-15;

/// z image of an s point under the SBT.
ComplexPoint sbt_z_of_s(ComplexPoint s, const SbtParams& p, double sample_time);

/// s preimage of a z point, computed from the real/imaginary closed forms.
ComplexPoint sbt_s_of_z(ComplexPoint z, const SbtParams& p, double sample_time);

/// z = e^{sT}.
ComplexPoint exact_z_of_s(ComplexPoint s, double sample_time);

/// Principal branch of s = ln(z)/T.
ComplexPoint equivalent_s_of_z(ComplexPoint z, double sample_time);

/// K_pw = tan(omega_n T / 2) / (omega_n T / 2).
double prewarp_factor(double omega_n, double sample_time);

StabilityCircle stability_circle(double alpha);

/// Closed-disk membership, boundary inclusive.
bool is_stable_image(ComplexPoint z, double alpha);

/// Substitutes the SBT into a continuous transfer function, clearing the
/// common (beta*T)^n (alpha*z + 1 - alpha)^n factor from both sides.
RationalTransferd substitute(const RationalTransferd& tf, const SbtParams& p, double sample_time);
RationalTransferd substitute(const RationalTransferd& tf, const Method& m, double sample_time);

}  // namespace sbt

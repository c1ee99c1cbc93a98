#pragma once

// Quasi-resonant (QR) and PI controllers, their closed-form discrete
// coefficients, and the difference-equation form used by the simulator.

#include "sbt/lti_core.hpp"
#include "sbt/transforms.hpp"

namespace sbt {

/// G(s) = 2 Kr wc s / (s^2 + 2 wc s + wn^2).
struct QrParams {
  double kr;       // resonant gain
  double omega_c;  // cutoff bandwidth, rad/s
  double omega_n;  // resonant angular frequency, rad/s

  void validate() const;
};

/// G(s) = Kp (1 + 1/(tau_i s)).
struct PiParams {
  double kp;
  double tau_i;  // seconds

  void validate() const;
};

/// Discrete biquad, coefficients in DESCENDING powers of z:
/// (a2 z^2 + a1 z + a0) / (b2 z^2 + b1 z + b0).
struct BiquadCoeffs {
  double a2, a1, a0;
  double b2, b1, b0;

  RationalTransferd to_transfer(double sample_time) const;
};

/// y(n) = Kin0 x(n) + Kin1 x(n-1) + Kin2 x(n-2) + Kout1 y(n-1) + Kout2 y(n-2).
struct DiffEqCoeffs {
  double kin0, kin1, kin2;
  double kout1, kout2;

  /// The biquad this recursion realizes, normalized to b2 = 1.
  BiquadCoeffs to_biquad() const;

  static DiffEqCoeffs pass_through() { return {1.0, 0.0, 0.0, 0.0, 0.0}; }
};

RationalTransferd qr_continuous(const QrParams& p);
RationalTransferd pi_continuous(const PiParams& p);
RationalTransferd pir_continuous(const PiParams& pi, const QrParams& qr);

/// Closed-form discrete QR coefficients for one method (the coefficient table
/// for Euler, Tustin, pre-warped Tustin and SBT).
BiquadCoeffs qr_discretize(const QrParams& p, const Method& m, double sample_time);

/// Tustin-discretized PI as a biquad with a0 = b0 = 0.
BiquadCoeffs pi_discretize_tustin(const PiParams& p, double sample_time);

DiffEqCoeffs diff_eq_coeffs(const BiquadCoeffs& c);

/// The straightforward design (alpha, beta) = (0.5, K_pw(omega_n, T)).
SbtParams sbt_params_straightforward(const QrParams& p, double sample_time);

}  // namespace sbt

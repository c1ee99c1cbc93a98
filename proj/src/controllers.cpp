#include "sbt/controllers.hpp"

#include <cmath>

namespace sbt {

void QrParams::validate() const {
  if (!(kr > 0.0) || !std::isfinite(kr)) throw ParamError("QR gain Kr must be > 0");
  if (!(omega_c > 0.0)) throw ParamError("QR bandwidth omega_c must be > 0");
  if (!(omega_c < omega_n) || !std::isfinite(omega_n)) throw ParamError("QR needs omega_c < omega_n");
}

void PiParams::validate() const {
  if (!(kp > 0.0) || !std::isfinite(kp)) throw ParamError("PI gain Kp must be > 0");
  if (!(tau_i > 0.0) || !std::isfinite(tau_i)) throw ParamError("PI integral time tau_i must be > 0");
}

RationalTransferd BiquadCoeffs::to_transfer(double sample_time) const {
  return RationalTransferd(Polynomiald{a0, a1, a2}, Polynomiald{b0, b1, b2}, Domain::discrete(sample_time));
}

BiquadCoeffs DiffEqCoeffs::to_biquad() const { return {kin0, kin1, kin2, 1.0, -kout1, -kout2}; }

RationalTransferd qr_continuous(const QrParams& p) {
  p.validate();
  return RationalTransferd(Polynomiald{0.0, 2.0 * p.kr * p.omega_c, 0.0},
                           Polynomiald{p.omega_n * p.omega_n, 2.0 * p.omega_c, 1.0}, Domain::continuous());
}

RationalTransferd pi_continuous(const PiParams& p) {
  p.validate();
  // Kp (tau_i s + 1) / (tau_i s)
  return RationalTransferd(Polynomiald{p.kp, p.kp * p.tau_i}, Polynomiald{0.0, p.tau_i}, Domain::continuous());
}

RationalTransferd pir_continuous(const PiParams& pi, const QrParams& qr) {
  return tf_parallel(pi_continuous(pi), qr_continuous(qr));
}

namespace {

BiquadCoeffs sbt_column(const QrParams& p, double alpha, double beta, double t) {
  const double k = p.kr * p.omega_c * t;
  const double wct = beta * p.omega_c * t;
  const double wnt = beta * p.omega_n * t;
  return {
      2.0 * alpha * beta * k,
      -(4.0 * alpha - 2.0) * beta * k,
      -(2.0 - 2.0 * alpha) * beta * k,
      1.0 + 2.0 * alpha * wct + (alpha * wnt) * (alpha * wnt),
      -2.0 - (4.0 * alpha - 2.0) * wct + 2.0 * alpha * (1.0 - alpha) * wnt * wnt,
      1.0 - (2.0 - 2.0 * alpha) * wct + ((1.0 - alpha) * wnt) * ((1.0 - alpha) * wnt),
  };
}

}  // namespace

BiquadCoeffs qr_discretize(const QrParams& p, const Method& m, double sample_time) {
  p.validate();
  if (!(sample_time > 0.0)) throw ParamError("sample time must be > 0");
  const double t = sample_time;
  const double k = p.kr * p.omega_c * t;
  const double wct = p.omega_c * t;

  struct {
    const QrParams& p;
    double t, k, wct;
    BiquadCoeffs operator()(const method::Euler&) const {
      const double wnt = p.omega_n * t;
      return {2.0 * k, -2.0 * k, 0.0, 1.0 + 2.0 * wct + wnt * wnt, -2.0 - 2.0 * wct, 1.0};
    }
    BiquadCoeffs operator()(const method::Tustin&) const { return tustin(p.omega_n * t); }
    BiquadCoeffs operator()(const method::TustinPrewarp& m) const {
      // Only the resonant frequency is pre-warped; omega_c keeps its value.
      return tustin(prewarp_factor(m.omega_n, t) * p.omega_n * t);
    }
    BiquadCoeffs operator()(const method::Sbt& m) const {
      return sbt_column(p, m.params.alpha(), m.params.beta(), t);
    }
    BiquadCoeffs tustin(double wnt) const {
      const double q = 0.5 * wnt;
      return {k, 0.0, -k, 1.0 + wct + q * q, 0.5 * wnt * wnt - 2.0, 1.0 - wct + q * q};
    }
  } visitor{p, t, k, wct};
  return std::visit(visitor, m);
}

BiquadCoeffs pi_discretize_tustin(const PiParams& p, double sample_time) {
  p.validate();
  const double g = p.kp * sample_time / (2.0 * p.tau_i);
  // (Kp + g) z + (g - Kp) over z - 1, lifted to second order by a factor z.
  return {p.kp + g, g - p.kp, 0.0, 1.0, -1.0, 0.0};
}

DiffEqCoeffs diff_eq_coeffs(const BiquadCoeffs& c) {
  if (std::abs(c.b2) < 1e-300) throw NormalizationError("leading denominator coefficient b2 vanishes");
  return {c.a2 / c.b2, c.a1 / c.b2, c.a0 / c.b2, -c.b1 / c.b2, -c.b0 / c.b2};
}

SbtParams sbt_params_straightforward(const QrParams& p, double sample_time) {
  return {0.5, prewarp_factor(p.omega_n, sample_time)};
}

}  // namespace sbt

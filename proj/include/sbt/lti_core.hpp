#pragma once

// Polynomial and rational transfer function arithmetic shared by every other
// module. Coefficients are stored in ASCENDING powers: coeffs[k] multiplies x^k.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <utility>

#include "sbt/errors.hpp"

namespace sbt {

/// A point in the s-plane (rad/s) or in the z-plane (unitless).
using ComplexPoint = std::complex<double>;

template <typename Scalar>
class Polynomial {
 public:
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// The zero polynomial, stored as [0].
  Polynomial() : coeffs_(Coeffs::Zero(1)) {}

  explicit Polynomial(Coeffs coeffs) : coeffs_(std::move(coeffs)) { normalize(); }

  Polynomial(std::initializer_list<Scalar> coeffs) : coeffs_(static_cast<Eigen::Index>(coeffs.size())) {
    Eigen::Index k = 0;
    for (Scalar c : coeffs) coeffs_[k++] = c;
    normalize();
  }

  static Polynomial constant(Scalar c) { return Polynomial{c}; }

  const Coeffs& coeffs() const { return coeffs_; }
  Eigen::Index degree() const { return coeffs_.size() - 1; }
  Scalar leading() const { return coeffs_[coeffs_.size() - 1]; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == Scalar(0); }

  /// Coefficient of x^k; zero beyond the degree.
  Scalar operator[](Eigen::Index k) const { return k < coeffs_.size() ? coeffs_[k] : Scalar(0); }

  /// Horner evaluation; X may be real or complex.
  template <typename X>
  auto operator()(const X& x) const {
    using Result = decltype(Scalar{} * x);
    Result acc = Result(coeffs_[coeffs_.size() - 1]);
    for (Eigen::Index k = coeffs_.size() - 2; k >= 0; --k) acc = acc * x + Result(coeffs_[k]);
    return acc;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.coeffs_.size() == b.coeffs_.size() && a.coeffs_ == b.coeffs_;
  }

 private:
  void normalize() {
    if (coeffs_.size() == 0) {
      coeffs_ = Coeffs::Zero(1);
      return;
    }
    Eigen::Index n = coeffs_.size();
    while (n > 1 && coeffs_[n - 1] == Scalar(0)) --n;
    if (n != coeffs_.size()) coeffs_.conservativeResize(n);
  }

  Coeffs coeffs_;
};

using Polynomiald = Polynomial<double>;

template <typename Scalar>
Polynomial<Scalar> operator+(const Polynomial<Scalar>& a, const Polynomial<Scalar>& b) {
  const Eigen::Index n = std::max(a.coeffs().size(), b.coeffs().size());
  typename Polynomial<Scalar>::Coeffs sum = Polynomial<Scalar>::Coeffs::Zero(n);
  sum.head(a.coeffs().size()) += a.coeffs();
  sum.head(b.coeffs().size()) += b.coeffs();
  return Polynomial<Scalar>(std::move(sum));
}

template <typename Scalar>
Polynomial<Scalar> operator*(const Polynomial<Scalar>& a, const Polynomial<Scalar>& b) {
  const auto& ca = a.coeffs();
  const auto& cb = b.coeffs();
  typename Polynomial<Scalar>::Coeffs prod = Polynomial<Scalar>::Coeffs::Zero(ca.size() + cb.size() - 1);
  for (Eigen::Index i = 0; i < ca.size(); ++i)
    for (Eigen::Index j = 0; j < cb.size(); ++j) prod[i + j] += ca[i] * cb[j];
  return Polynomial<Scalar>(std::move(prod));
}

template <typename Scalar>
Polynomial<Scalar> operator*(Scalar c, const Polynomial<Scalar>& p) {
  return Polynomial<Scalar>(typename Polynomial<Scalar>::Coeffs(c * p.coeffs()));
}

template <typename Scalar>
Polynomial<Scalar> pow(const Polynomial<Scalar>& p, int k) {
  Polynomial<Scalar> out = Polynomial<Scalar>::constant(Scalar(1));
  for (int i = 0; i < k; ++i) out = out * p;
  return out;
}

/// Continuous (s) or discrete (z, with sample time T) domain tag.
class Domain {
 public:
  static Domain continuous() { return Domain(false, 0.0); }
  static Domain discrete(double sample_time) {
    if (!(sample_time > 0.0) || !std::isfinite(sample_time))
      throw ParamError("discrete domain needs a finite sample time T > 0");
    return Domain(true, sample_time);
  }

  bool is_continuous() const { return !discrete_; }
  bool is_discrete() const { return discrete_; }
  double sample_time() const { return sample_time_; }

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  Domain(bool discrete, double sample_time) : discrete_(discrete), sample_time_(sample_time) {}

  bool discrete_;
  double sample_time_;
};

template <typename Scalar>
class RationalTransfer {
 public:
  RationalTransfer(Polynomial<Scalar> num, Polynomial<Scalar> den, Domain domain)
      : num_(std::move(num)), den_(std::move(den)), domain_(domain) {
    if (den_.is_zero()) throw ParamError("transfer function denominator is the zero polynomial");
  }

  const Polynomial<Scalar>& num() const { return num_; }
  const Polynomial<Scalar>& den() const { return den_; }
  const Domain& domain() const { return domain_; }

 private:
  Polynomial<Scalar> num_;
  Polynomial<Scalar> den_;
  Domain domain_;
};

using RationalTransferd = RationalTransfer<double>;

inline constexpr double kPoleHitTolerance = 1e-300;

template <typename Scalar>
std::complex<Scalar> tf_eval(const RationalTransfer<Scalar>& tf, const std::complex<Scalar>& x) {
  const std::complex<Scalar> d = tf.den()(x);
  if (std::abs(d) < Scalar(kPoleHitTolerance)) throw PoleHit("denominator vanishes at the evaluation point");
  return tf.num()(x) / d;
}

/// Sum of two transfer functions over a common denominator; no cancellation.
template <typename Scalar>
RationalTransfer<Scalar> tf_parallel(const RationalTransfer<Scalar>& a, const RationalTransfer<Scalar>& b) {
  if (!(a.domain() == b.domain())) throw DomainMismatch("parallel connection of transfer functions in different domains");
  return RationalTransfer<Scalar>(a.num() * b.den() + b.num() * a.den(), a.den() * b.den(), a.domain());
}

/// Roots of a degree-2 polynomial. Complex pairs come positive-imaginary first;
/// real pairs in descending order.
template <typename Scalar>
std::array<std::complex<Scalar>, 2> quadratic_roots(const Polynomial<Scalar>& p) {
  if (p.degree() != 2) throw DegreeError("quadratic_roots needs a degree-2 polynomial");
  const Scalar a = p[2];
  const Scalar b = p[1];
  const Scalar c = p[0];
  const Scalar disc = b * b - Scalar(4) * a * c;
  if (disc < Scalar(0)) {
    const Scalar re = -b / (Scalar(2) * a);
    const Scalar im = std::abs(std::sqrt(-disc) / (Scalar(2) * a));
    return {std::complex<Scalar>(re, im), std::complex<Scalar>(re, -im)};
  }
  // Cancellation-free form for real roots.
  const Scalar q = Scalar(-0.5) * (b + std::copysign(std::sqrt(disc), b));
  Scalar r1 = q / a;
  Scalar r2 = q != Scalar(0) ? c / q : Scalar(0);
  if (r1 < r2) std::swap(r1, r2);
  return {std::complex<Scalar>(r1), std::complex<Scalar>(r2)};
}

}  // namespace sbt

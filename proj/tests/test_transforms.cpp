#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "sbt/transforms.hpp"

using namespace sbt;

namespace {

constexpr double kT = 5e-5;
const ComplexPoint kPole(-17.907, 5968.97313993);  // sqrt(5969^2 - 17.907^2)

double rel(ComplexPoint a, ComplexPoint b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(SbtParams(0.0, 1.0));
  CHECK_NOTHROW(SbtParams(1.0, 1e-6));
  CHECK_THROWS_AS(SbtParams(-0.1, 1.0), ParamError);
  CHECK_THROWS_AS(SbtParams(1.1, 1.0), ParamError);
  CHECK_THROWS_AS(SbtParams(0.5, 0.0), ParamError);
  CHECK_FALSE(SbtParams(0.3, 1.0).in_stable_range());
  CHECK(SbtParams(0.5, 1.0).in_stable_range());
  CHECK(SbtParams(1.0, 1.0).in_stable_range());
}

TEST_CASE("method names and parameter equivalents") {
  CHECK(method_name(method::Euler{}) == "euler");
  CHECK(method_name(method::Tustin{}) == "tustin");
  CHECK(method_name(method::TustinPrewarp{5969.0}) == "sota");
  CHECK(method_name(method::Sbt{SbtParams(0.7, 1.0)}) == "sbt");
  CHECK(to_sbt_params(method::Euler{}, kT) == SbtParams(1.0, 1.0));
  CHECK(to_sbt_params(method::Tustin{}, kT) == SbtParams(0.5, 1.0));
  CHECK(to_sbt_params(method::TustinPrewarp{5969.0}, kT).beta() == doctest::Approx(1.00749).epsilon(1e-5));
}

TEST_CASE("forward map") {
  CHECK(sbt_z_of_s(0.0, SbtParams(0.7, 1.3), kT) == ComplexPoint(1.0, 0.0));
  const auto e = sbt_z_of_s(kPole, SbtParams(1.0, 1.0), kT);
  CHECK(e.real() == doctest::Approx(0.91753).epsilon(1e-5));
  CHECK(e.imag() == doctest::Approx(0.27359).epsilon(2e-5));
  const auto t = sbt_z_of_s(kPole, SbtParams(0.5, 1.0), kT);
  CHECK(t.real() == doctest::Approx(0.95560).epsilon(1e-5));
  CHECK(t.imag() == doctest::Approx(0.29169).epsilon(2e-5));
  // alpha beta T s = 1 is the map's pole
  CHECK_THROWS_AS(sbt_z_of_s(ComplexPoint(1.0 / kT, 0.0), SbtParams(1.0, 1.0), kT), MapSingularity);
}

TEST_CASE("forward map agrees with direct complex arithmetic") {
  oracle::Gen g(21);
  for (int i = 0; i < 500; ++i) {
    const double a = g.uniform(0.0, 1.0), b = g.uniform(0.5, 2.0), t = g.log_uniform(1e-6, 1e-3);
    const ComplexPoint s(g.uniform(-1.0, 0.2) / t, g.uniform(-3.0, 3.0) / t);
    const auto ref = oracle::sbt_map(oracle::cld(s.real(), s.imag()), a, b, t);
    const ComplexPoint want(static_cast<double>(ref.real()), static_cast<double>(ref.imag()));
    CHECK(rel(sbt_z_of_s(s, SbtParams(a, b), t), want) < 1e-12);
  }
}

TEST_CASE("inverse map") {
  CHECK(std::abs(sbt_s_of_z(1.0, SbtParams(0.6, 1.0), kT)) == doctest::Approx(0.0));
  for (double th : {0.1, 0.5, 1.0, 2.0, 3.0}) {
    const auto s = sbt_s_of_z(std::polar(1.0, th), SbtParams(0.5, 1.0), 1.0);
    CHECK(std::abs(s.real()) < 1e-12);
  }
}

TEST_CASE("property: inverse round trip") {
  oracle::Gen g(22);
  for (int i = 0; i < 100; ++i) {
    const SbtParams p(g.uniform(0.5, 1.0), g.uniform(0.9, 1.1));
    const ComplexPoint s(-g.uniform(0.0, 2e4), g.uniform(-6e4, 6e4));
    CHECK(rel(sbt_s_of_z(sbt_z_of_s(s, p, kT), p, kT), s) < 1e-10);
  }
}

TEST_CASE("exact map and equivalent pole") {
  const auto z = exact_z_of_s(ComplexPoint(-17.907, 5969.0), kT);
  CHECK(z.real() == doctest::Approx(0.95494).epsilon(1e-5));
  CHECK(z.imag() == doctest::Approx(0.29378).epsilon(2e-5));
  CHECK(exact_z_of_s(0.0, kT) == ComplexPoint(1.0, 0.0));
  const auto nyq = exact_z_of_s(ComplexPoint(0.0, std::numbers::pi / kT), kT);
  CHECK(nyq.real() == doctest::Approx(-1.0));
  CHECK(std::abs(nyq.imag()) < 1e-12);

  CHECK(std::abs(equivalent_s_of_z(1.0, kT)) == 0.0);
  CHECK_THROWS_AS(equivalent_s_of_z(0.0, kT), OriginError);
  const auto s = equivalent_s_of_z(z, kT);
  CHECK(s.real() == doctest::Approx(-17.907).epsilon(1e-9));
  CHECK(s.imag() == doctest::Approx(5969.0).epsilon(1e-12));
}

TEST_CASE("equivalent pole matches the log/arctangent forms") {
  oracle::Gen g(23);
  for (int i = 0; i < 500; ++i) {
    const ComplexPoint z = std::polar(g.uniform(0.01, 2.0), g.uniform(-3.1, 3.1));
    const auto ref = oracle::equivalent_s(oracle::cld(z.real(), z.imag()), kT);
    const ComplexPoint want(static_cast<double>(ref.real()), static_cast<double>(ref.imag()));
    CHECK(rel(equivalent_s_of_z(z, kT), want) < 1e-12);
  }
}

TEST_CASE("property: exact map round trip") {
  oracle::Gen g(24);
  for (int i = 0; i < 1000; ++i) {
    const ComplexPoint s(g.uniform(-2e4, 2e4), g.uniform(-0.99, 0.99) * std::numbers::pi / kT);
    CHECK(rel(equivalent_s_of_z(exact_z_of_s(s, kT), kT), s) < 1e-10);
  }
}

TEST_CASE("pre-warp factor") {
  const double kpw = prewarp_factor(5969.0, kT);
  CHECK(kpw == doctest::Approx(static_cast<double>(oracle::prewarp(5969.0L, 5e-5L))).epsilon(1e-14));
  CHECK(kpw == doctest::Approx(1.00749).epsilon(1e-4));
  CHECK(prewarp_factor(2e-8 / kT, kT) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(prewarp_factor(std::numbers::pi / 2 / kT, kT) == doctest::Approx(4.0 / std::numbers::pi).epsilon(1e-12));
  CHECK_THROWS_AS(prewarp_factor(0.0, kT), DomainError);
  CHECK_THROWS_AS(prewarp_factor(std::numbers::pi / kT, kT), DomainError);
}

TEST_CASE("stability circle") {
  auto c = stability_circle(0.5);
  CHECK(c.center_re == doctest::Approx(0.0));
  CHECK(c.radius == doctest::Approx(1.0));
  c = stability_circle(1.0);
  CHECK(c.center_re == doctest::Approx(0.5));
  CHECK(c.radius == doctest::Approx(0.5));
  c = stability_circle(0.75);
  CHECK(c.center_re == doctest::Approx(1.0 / 3.0));
  CHECK(c.radius == doctest::Approx(2.0 / 3.0));
  CHECK(is_stable_image(1.0, 0.5));
  CHECK(is_stable_image(1.0, 0.8));
  CHECK_FALSE(is_stable_image(-1.0, 0.6));
}

TEST_CASE("property: left half plane lands in the stability circle") {
  oracle::Gen g(25);
  for (int i = 0; i < 10000; ++i) {
    const double a = g.uniform(0.5, 1.0);
    const ComplexPoint s(-g.log_uniform(1e-3, 1e7), g.uniform(-1e7, 1e7));
    const ComplexPoint z = sbt_z_of_s(s, SbtParams(a, g.uniform(0.5, 2.0)), kT);
    REQUIRE(is_stable_image(z, a));
    REQUIRE(std::abs(z) <= 1.0 + 1e-12);
  }
}

TEST_CASE("substitution") {
  const RationalTransferd integ(Polynomiald{1.0}, Polynomiald{0.0, 1.0}, Domain::continuous());
  const auto d = substitute(integ, SbtParams(1.0, 1.0), kT);
  CHECK(d.domain() == Domain::discrete(kT));
  // T z / (z - 1)
  const double k = d.den()[1];
  CHECK(d.den()[0] / k == doctest::Approx(-1.0));
  CHECK(d.num()[1] / k == doctest::Approx(kT));
  CHECK(d.num()[0] / k == doctest::Approx(0.0));
  const RationalTransferd already(Polynomiald{1.0}, Polynomiald{1.0}, Domain::discrete(kT));
  CHECK_THROWS_AS(substitute(already, SbtParams(1.0, 1.0), kT), DomainMismatch);
}

TEST_CASE("property: substituted transfer equals analog at the mapped point") {
  oracle::Gen g(26);
  for (int i = 0; i < 200; ++i) {
    const Polynomiald n{g.uniform(-2, 2), g.uniform(-2, 2), g.uniform(-2, 2)};
    const Polynomiald den{g.uniform(0.5, 2), g.uniform(0.5, 2), g.uniform(0.5, 2), 1.0};
    const RationalTransferd h(n, den, Domain::continuous());
    const SbtParams p(g.uniform(0.5, 1.0), g.uniform(0.9, 1.1));
    const double t = 0.05;
    const auto hd = substitute(h, p, t);
    const ComplexPoint z = std::polar(g.uniform(0.5, 1.5), g.uniform(0.1, 3.0));
    const ComplexPoint s = sbt_s_of_z(z, p, t);
    CHECK(rel(tf_eval(hd, z), tf_eval(h, s)) < 1e-10);
  }
}

TEST_CASE("property: DC gain is preserved") {
  oracle::Gen g(27);
  for (int i = 0; i < 200; ++i) {
    const Polynomiald n{g.uniform(-2, 2), g.uniform(-2, 2)};
    const Polynomiald den{g.uniform(0.5, 2), g.uniform(0.5, 2), 1.0};
    const RationalTransferd h(n, den, Domain::continuous());
    const auto hd = substitute(h, SbtParams(g.uniform(0.5, 1.0), g.uniform(0.5, 2.0)), g.uniform(0.05, 0.5));
    CHECK(rel(tf_eval(hd, ComplexPoint(1.0)), tf_eval(h, ComplexPoint(0.0))) < 1e-11);
  }
}

TEST_CASE("property: beta scales the sample time") {
  // SBT(alpha, beta) at T equals SBT(alpha, 1) at beta T on the same z.
  oracle::Gen g(28);
  for (int i = 0; i < 200; ++i) {
    const double a = g.uniform(0.5, 1.0), b = g.uniform(0.9, 1.1);
    const ComplexPoint z = std::polar(g.uniform(0.5, 1.5), g.uniform(0.1, 3.0));
    CHECK(rel(sbt_s_of_z(z, SbtParams(a, b), kT), sbt_s_of_z(z, SbtParams(a, 1.0), b * kT)) < 1e-12);
  }
}

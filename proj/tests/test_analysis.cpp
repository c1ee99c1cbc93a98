#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracle.hpp"
#include "sbt/analysis.hpp"

using namespace sbt;

namespace {

constexpr double kT = 5e-5;
const QrParams kQr{59.1, 17.907, 5969.0};
const double kFn = 5969.0 / (2 * std::numbers::pi);

RationalTransferd discrete(const Method& m) { return qr_discretize(kQr, m, kT).to_transfer(kT); }
RationalTransferd sbt_straight() { return discrete(method::Sbt{sbt_params_straightforward(kQr, kT)}); }

}  // namespace

TEST_CASE("grids") {
  const auto d = default_grid();
  CHECK(d.size() == 201);
  CHECK(d.hz().front() == 900.0);
  CHECK(d.hz().back() == 1000.0);
  CHECK(d.hz()[1] == doctest::Approx(900.5));
  const auto w = wide_grid();
  CHECK(w.hz().front() == 10.0);
  CHECK(w.hz().back() == 9500.0);
  CHECK(w.spacing() == FrequencyGrid::Spacing::explicit_points);
  for (std::size_t i = 1; i < w.size(); ++i) REQUIRE(w.hz()[i] > w.hz()[i - 1]);
  const auto e = FrequencyGrid::explicit_points({3.0, 1.0, 2.0, 1.0});
  CHECK(e.size() == 3);
  CHECK(e.hz().front() == 1.0);
  CHECK_THROWS_AS(FrequencyGrid::explicit_points({}), EmptyInput);
  CHECK_THROWS_AS(FrequencyGrid::explicit_points({-1.0, 2.0}), ParamError);
  CHECK_THROWS_AS(FrequencyGrid::linear(10.0, 5.0, 4), ParamError);
  CHECK_THROWS_AS(FrequencyGrid::linear(10.0, 20.0, 0), ParamError);
  CHECK_THROWS_AS(FrequencyGrid::logarithmic(0.0, 20.0, 4), ParamError);
  CHECK_THROWS_AS(FrequencyGrid::linear(100.0, 12000.0, 10).check_below_nyquist(kT), DomainError);
}

TEST_CASE("frequency response") {
  const auto g = qr_continuous(kQr);
  const auto at_fn = freq_response(g, FrequencyGrid::explicit_points({kFn}));
  CHECK(at_fn[0].mag_db == doctest::Approx(20 * std::log10(59.1)).epsilon(1e-12));
  CHECK(at_fn[0].mag_db == doctest::Approx(35.43).epsilon(1e-4));
  CHECK(std::abs(at_fn[0].phase_deg) < 1e-6);
  CHECK(freq_response(g, FrequencyGrid::explicit_points({0.01}))[0].mag_db < -40.0);

  const auto grid = FrequencyGrid::explicit_points({950.0});
  const double a = freq_response(g, grid)[0].mag_db;
  const double s = freq_response(sbt_straight(), grid)[0].mag_db;
  CHECK(std::abs(a - s) < 0.1);

  // output order follows the grid
  const auto r = freq_response(g, default_grid());
  for (std::size_t i = 0; i < r.size(); ++i) REQUIRE(r[i].f_hz == default_grid().hz()[i]);
}

TEST_CASE("pole hit is flagged, not thrown") {
  // 1/s evaluated at DC
  const RationalTransferd integ(Polynomiald{1.0}, Polynomiald{0.0, 1.0}, Domain::discrete(kT));
  const RationalTransferd shifted(Polynomiald{1.0}, Polynomiald{-1.0, 1.0}, Domain::discrete(kT));
  const auto r = freq_response(shifted, FrequencyGrid::explicit_points({1e-300, 100.0}));
  CHECK(r[0].pole_hit);
  CHECK_FALSE(r[1].pole_hit);
  CHECK_NOTHROW(freq_response(integ, default_grid()));
}

TEST_CASE("magnitude error curves") {
  const auto g = qr_continuous(kQr);
  for (const auto& p : magnitude_difference(g, g, wide_grid())) REQUIRE(std::abs(p.err_db) < 1e-9);
  CHECK_THROWS_AS(magnitude_error_curve(g, g, default_grid()), DomainMismatch);
  CHECK_THROWS_AS(magnitude_error_curve(sbt_straight(), sbt_straight(), default_grid()), DomainMismatch);

  double worst = 0.0;
  for (const auto& p : magnitude_error_curve(g, discrete(method::Euler{}), default_grid()))
    worst = std::max(worst, std::abs(p.err_db));
  CHECK(worst >= 30.0);

  // Tustin: its warped peak sits below fn, so the error is negative there and
  // positive at fn, with a sign change in between.
  const auto tus = magnitude_error_curve(g, discrete(method::Tustin{}), resonance_grid(945.0, 10.0, 401));
  double lo = 0.0, hi = 0.0;
  int crossings = 0;
  for (std::size_t i = 0; i < tus.size(); ++i) {
    lo = std::min(lo, tus[i].err_db);
    hi = std::max(hi, tus[i].err_db);
    if (i > 0 && (tus[i].err_db > 0) != (tus[i - 1].err_db > 0)) {
      ++crossings;
      CHECK(tus[i].f_hz > 943.0);
      CHECK(tus[i].f_hz < kFn);
    }
  }
  CHECK(crossings == 1);
  CHECK(lo < -5.0);
  CHECK(hi > 5.0);
}

TEST_CASE("rmse") {
  const std::vector<double> c(7, -2.5);
  CHECK(rmse(c) == doctest::Approx(2.5));
  CHECK(rmse(std::vector<double>(5, 0.0)) == 0.0);
  CHECK_THROWS_AS(rmse(std::vector<double>{}), EmptyInput);
  const std::vector<double> v{3.0, 4.0};
  CHECK(rmse(v) == doctest::Approx(std::sqrt(12.5)));
}

TEST_CASE("RMSE ratio on the default grid") {
  const auto g = qr_continuous(kQr);
  const double s = magnitude_rmse(g, sbt_straight(), default_grid());
  const double p = magnitude_rmse(g, discrete(method::TustinPrewarp{5969.0}), default_grid());
  CHECK(s / p == doctest::Approx(0.67).epsilon(0.01));
  // the linear scale keeps the ordering
  CHECK(magnitude_rmse(g, sbt_straight(), default_grid(), ErrorScale::linear) <
        magnitude_rmse(g, discrete(method::TustinPrewarp{5969.0}), default_grid(), ErrorScale::linear));
}

TEST_CASE("magnitude RMSE against direct evaluation") {
  const auto g = qr_continuous(kQr);
  const auto c = oracle::qr_sbt(59.1, 17.907, 5969.0, 0.8, 1.02, kT);
  const auto grid = resonance_grid(950.0, 200.0, 101);
  long double acc = 0.0L;
  for (double f : grid.hz()) {
    const long double w = 2.0L * oracle::kPi * f;
    const long double ma = std::abs(oracle::qr_analog(59.1, 17.907, 5969.0, oracle::cld(0.0L, w)));
    const long double md = std::abs(oracle::eval(c, std::polar(1.0L, w * 5e-5L)));
    const long double e = 20.0L * std::log10(ma / md);
    acc += e * e;
  }
  const double want = static_cast<double>(std::sqrt(acc / grid.size()));
  const double got = magnitude_rmse(g, discrete(method::Sbt{SbtParams(0.8, 1.02)}), grid);
  CHECK(got == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("peaks") {
  const auto g = qr_continuous(kQr);
  const auto a = find_peak(g, 800.0, 1100.0);
  CHECK(a.f_hz == doctest::Approx(kFn).epsilon(1e-7));
  CHECK(a.mag_db == doctest::Approx(20 * std::log10(59.1)).epsilon(1e-9));
  const auto t = find_peak(discrete(method::Tustin{}), 800.0, 1100.0);
  // warped resonance (2/T) atan(wn T / 2) / 2 pi
  const double warped = 2.0 / kT * std::atan(5969.0 * kT / 2) / (2 * std::numbers::pi);
  CHECK(t.f_hz == doctest::Approx(warped).epsilon(1e-4));
  CHECK(kFn - t.f_hz > 6.9);
  CHECK(kFn - t.f_hz < 7.0);
  const auto e = find_peak(discrete(method::Euler{}), 800.0, 1100.0);
  CHECK(a.mag_db - e.mag_db > 33.0);
}

TEST_CASE("source poles") {
  const auto p = source_poles(kQr, kT);
  CHECK(p.original.real() == -17.907);
  CHECK(p.original.imag() == doctest::Approx(5968.97).epsilon(1e-6));
  CHECK(p.prewarped.imag() == doctest::Approx(6013.7).epsilon(2e-5));
  const auto narrow = source_poles(QrParams{1.0, 1e-9, 5969.0}, kT);
  CHECK(narrow.original.imag() == doctest::Approx(5969.0));
}

TEST_CASE("pole map table") {
  const std::vector<Method> ms{method::Euler{}, method::Tustin{}, method::TustinPrewarp{5969.0},
                               method::Sbt{sbt_params_straightforward(kQr, kT)}};
  const auto rows = pole_map_table(kQr, kT, ms);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].label() == "exact");
  CHECK(rows[3].label() == "sota");
  for (const auto& r : rows) CHECK(std::abs(r.mapped_z - r.root_z) < 1e-12);

  // full-precision expectations, computed by direct complex arithmetic
  const oracle::cld s0(-17.907L, std::sqrt(5969.0L * 5969.0L - 17.907L * 17.907L));
  const oracle::cld ze = std::exp(s0 * 5e-5L);
  CHECK(std::abs(rows[0].mapped_z - ComplexPoint(ze.real(), ze.imag())) < 1e-14);
  const oracle::cld zs = oracle::sbt_map(s0, 0.5L, oracle::prewarp(5969.0L, 5e-5L), 5e-5L);
  CHECK(std::abs(rows[4].mapped_z - ComplexPoint(zs.real(), zs.imag())) < 1e-14);
  const auto ss = oracle::equivalent_s(zs, 5e-5L);
  CHECK(rows[4].equivalent_s.real() == doctest::Approx(static_cast<double>(ss.real())).epsilon(1e-9));

  CHECK(rows[3].equivalent_s.real() == doctest::Approx(-17.511).epsilon(1e-4));
  CHECK(rows[4].equivalent_s.real() == doctest::Approx(-17.642).epsilon(1e-4));
  CHECK(std::lround(rows[4].equivalent_s.imag()) == 5969);

  const auto only_exact = pole_map_table(kQr, kT, {});
  CHECK(only_exact.size() == 1);
}

TEST_CASE("Tustin always warps downward") {
  const QrParams q{10.0, 20.0, 2 * std::numbers::pi * 2000.0};
  const std::vector<Method> ms{method::Tustin{}};
  const auto rows = pole_map_table(q, kT, ms);
  CHECK(rows[1].equivalent_s.imag() < q.omega_n);
}

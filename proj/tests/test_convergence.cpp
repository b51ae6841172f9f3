#include <doctest.h>

#include <cmath>

#include "dch/convergence.hpp"

using namespace dch;

namespace {

PowerSeries series(std::vector<Complex> a, std::string label = "test") {
  PowerSeries s;
  s.coefficients = std::move(a);
  s.label = std::move(label);
  return s;
}

// Unit-radius patch: corner origin, delta0 = 1/sqrt(2) at theta = pi/4.
RefiningFamily unit_patch() {
  RefiningFamily f = RefiningFamily::rect();
  f.delta0 = 1.0 / std::sqrt(2.0);
  return f;
}

}  // namespace

TEST_CASE("refine") {
  const RefiningFamily rect = RefiningFamily::rect();
  CHECK(refine(rect, 3)->delta() == doctest::Approx(rect.delta0 / 8));
  const MapPtr chain = refine(RefiningFamily::chain(), 4);
  CHECK(chain->quad_count() == 16);
  CHECK(chain->delta() == doctest::Approx(1.0 / 16));
  for (const RefiningFamily& f : {rect, RefiningFamily::chain()}) {
    const Complex o = refine(f, 0)->z(refine(f, 0)->origin());
    for (int l = 1; l <= 5; ++l) {
      const MapPtr m = refine(f, l);
      CHECK(m->z(m->origin()) == o);
      CHECK(m->eta() >= f.eta_floor);
    }
  }
  CHECK_THROWS_AS(refine(RefiningFamily::rect(0.1), 2), ValidationError);
  CHECK_THROWS_AS(refine(rect, -1), ValidationError);
  CHECK_THROWS_AS(refine(rect, rect.max_level + 1), ValidationError);
}

TEST_CASE("power series helpers") {
  const PowerSeries s = series({1.0, 2.0, 3.0});
  CHECK(s(2.0) == Complex(17.0));
  const PowerSeries p = s.primitive();
  CHECK(p.coefficients.size() == 4);
  CHECK(p(1.0) == Complex(3.0));
  CHECK(std::isinf(s.radius_estimate()));
  const PowerSeries e = PowerSeries::exponential(kI, 40);
  CHECK(std::abs(e(0.5) - std::exp(0.5 * kI)) < 1e-15);
  std::vector<Complex> geo(40);
  for (int k = 0; k < 40; ++k) geo[k] = std::pow(0.5, k);
  CHECK(series(geo).radius_estimate() == doctest::Approx(2.0));
}

TEST_CASE("fit_order") {
  std::vector<ConvergenceRow> rows;
  for (int l = 1; l <= 6; ++l) rows.push_back({l, std::ldexp(1.0, -l), 3.0 * std::ldexp(1.0, -2 * l)});
  const OrderFit fit = fit_order(rows);
  CHECK(fit.order == doctest::Approx(2.0));
  CHECK(fit.residual < 1e-12);
  CHECK_FALSE(fit.exact);
  rows[0].sup_error = 1.0;  // outside the finest four
  CHECK(fit_order(rows).order == doctest::Approx(2.0));
  for (ConvergenceRow& r : rows) r.sup_error = 1e-14;
  CHECK(fit_order(rows).exact);
}

TEST_CASE("monomial convergence") {
  const LevelRange levels{3, 6};
  SUBCASE("degree one is exact") {
    const ConvergenceReport r = monomial_convergence(RefiningFamily::rect(0.9), 1, levels);
    for (const ConvergenceRow& row : r.rows) CHECK(row.sup_error == 0.0);
    CHECK(r.fit.exact);
  }
  SUBCASE("degree two agrees pointwise") {
    const ConvergenceReport r = monomial_convergence(RefiningFamily::rect(), 2, levels);
    for (const ConvergenceRow& row : r.rows) CHECK(row.sup_error <= 1e-12);
  }
  SUBCASE("degree three on the chain") {
    const ConvergenceReport r = monomial_convergence(RefiningFamily::chain(), 3, levels);
    REQUIRE(r.rows.size() == 4);
    for (const ConvergenceRow& row : r.rows) {
      const double n = std::ldexp(1.0, row.level);
      CHECK(row.sup_error == doctest::Approx(1.0 / (2 * n * n)).epsilon(1e-12));
    }
    CHECK(r.fit.order == doctest::Approx(2.0).epsilon(0.005));
    CHECK(r.monotone());
    CHECK(r.lambda_bound > 0.0);
  }
  CHECK_THROWS_AS(monomial_convergence(RefiningFamily::chain(), 9, levels), ValidationError);
  CHECK_THROWS_AS(monomial_convergence(RefiningFamily::chain(), 3, {4, 3}), ValidationError);
}

TEST_CASE("primitive convergence") {
  const LevelRange levels{3, 6};
  SUBCASE("f = 1 and f = z are exact") {
    for (const PowerSeries& f : {series({1.0}), series({0.0, 1.0})}) {
      const ConvergenceReport r = primitive_convergence(RefiningFamily::rect(), f, levels);
      for (const ConvergenceRow& row : r.rows) CHECK(row.sup_error <= 1e-12);
      for (const ConvergenceRow& row : r.raw_rows) CHECK(row.sup_error <= 1e-12);
    }
  }
  SUBCASE("exp") {
    const ConvergenceReport r =
        primitive_convergence(RefiningFamily::rect(), PowerSeries::exponential(), levels);
    CHECK(r.fit.order >= 1.8);
    CHECK(r.fit.order <= 2.2);
    CHECK(r.fit.residual < 0.1);
    CHECK(r.raw_fit.order >= 1.8);
    CHECK(r.monotone());
  }
  SUBCASE("radius too small") {
    std::vector<Complex> ones(30, 1.0);
    CHECK_THROWS_AS(primitive_convergence(RefiningFamily::rect(), series(ones), levels), ValidationError);
  }
}

TEST_CASE("series approximation") {
  const LevelRange levels{3, 6};
  SUBCASE("finite series is exact") {
    const ConvergenceReport r = series_approximation(RefiningFamily::rect(), series({1.0, 1.0}), levels);
    for (const ConvergenceRow& row : r.rows) CHECK(row.sup_error == 0.0);
    CHECK_FALSE(r.warning);
  }
  SUBCASE("exp stays within twice the componentwise budget") {
    const RefiningFamily fam = RefiningFamily::rect();
    const PowerSeries f = PowerSeries::exponential(1.0, 30);
    const ConvergenceReport r = series_approximation(fam, f, levels);
    CHECK(r.monotone());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const int n = r.truncation[i];
      CHECK(n >= r.rows[i].level + 2);
      // Per-degree errors over every vertex of the level bound those at the samples.
      const MapPtr map = refine(fam, r.rows[i].level);
      const auto zs = monomials(map, n);
      double budget = 0.0;
      for (int k = 2; k <= n; ++k) {
        double err = 0.0;
        for (VertexId v = 0; v < map->vertex_count(); ++v)
          err = std::max(err, std::abs(zs[k][v] - std::pow(map->z(v) - map->z(map->origin()), k)));
        budget += std::abs(f.coefficients[k]) * err;
      }
      double tail = 0.0;
      for (int k = n + 1; k < 30; ++k) tail += std::abs(f.coefficients[k]) * std::pow(std::sqrt(2.0), k);
      CHECK(r.rows[i].sup_error <= 2.0 * (budget + tail));
    }
  }
  SUBCASE("geometric series on a unit patch") {
    std::vector<Complex> a(60);
    for (int k = 0; k < 60; ++k) a[k] = std::pow(0.5, k);
    const ConvergenceReport r = series_approximation(unit_patch(), series(a), levels);
    CHECK(r.monotone());
    CHECK(r.fit.order >= 1.8);
    CHECK(r.fit.order <= 2.2);
    CHECK(r.fit.residual < 0.1);
  }
  CHECK(truncation_degree(series({1.0, 1.0, 1.0}), 3, 0.1, 1.0) == 2);
  CHECK(truncation_degree(PowerSeries::exponential(), 4, 0.1, 1.0) >= 6);
}

TEST_CASE("exp convergence") {
  const LevelRange levels{3, 6};
  const ConvergenceReport zero = exp_convergence(RefiningFamily::rect(), 0.0, levels);
  for (const ConvergenceRow& row : zero.rows) CHECK(row.sup_error == 0.0);
  const ConvergenceReport one = exp_convergence(RefiningFamily::rect(), 1.0, levels);
  CHECK(one.fit.order >= 1.8);
  CHECK(one.fit.order <= 2.2);
  CHECK(one.monotone());
  const ConvergenceReport i = exp_convergence(RefiningFamily::chain(), kI, levels);
  CHECK(i.fit.order >= 1.8);
  CHECK(i.fit.order <= 2.2);
  CHECK_THROWS_AS(exp_convergence(RefiningFamily::chain(), 20.0, {2, 3}), ValidationError);
}

TEST_CASE("reports do not depend on the thread count") {
  const auto a = exp_convergence(RefiningFamily::rect(0.9), {1, 1}, {2, 6}, {1});
  const auto b = exp_convergence(RefiningFamily::rect(0.9), {1, 1}, {2, 6}, {4});
  CHECK(to_csv(a) == to_csv(b));
}

TEST_CASE("csv report") {
  const ConvergenceReport r = monomial_convergence(RefiningFamily::chain(), 3, {3, 4});
  const std::string csv = to_csv(r);
  CHECK(csv.rfind("level,delta,sup_error\n3,0.125,0.0078125\n4,0.0625,0.001953125\n", 0) == 0);
  const auto last = csv.substr(csv.rfind("# "));
  CHECK(last.rfind("# order=", 0) == 0);
  CHECK(last.find(",resid=") != std::string::npos);
  CHECK(to_csv(monomial_convergence(RefiningFamily::chain(), 1, {3, 4})).find("# order=exact") !=
        std::string::npos);
}

#include "bernmar/theory.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

using namespace bernmar;

namespace {

// Beta(2, 5) CDF as P(Bin(6, y) >= 2).
double
beta25_cdf(double y)
{
  return 1.0 - std::pow(1.0 - y, 6) - 6.0 * y * std::pow(1.0 - y, 5);
}

double
median_beta25()
{
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (beta25_cdf(mid) < 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// argmin over integer m of b^2 / m^2 - V / (n sqrt(m))
int
brute_force_degree(double b, double v, double n)
{
  int best = 1;
  double best_value = INFINITY;
  for (int m = 1; m < 200000; ++m) {
    const double value = b * b / (static_cast<double>(m) * m) - v / (n * std::sqrt(m));
    if (value < best_value) {
      best_value = value;
      best = m;
    }
  }
  return best;
}

} // namespace

TEST_CASE("hand arithmetic at the median of Beta(2, 5)")
{
  const auto ctx = beta25_mar_model();
  const double y = median_beta25();
  CHECK(y == doctest::Approx(0.26445).epsilon(1e-5));
  CHECK(ctx.cdf(y) == doctest::Approx(0.5).epsilon(1e-12));
  // 0.25 (0.5 / 0.6 + 0.5 / 0.9) - 0.25
  CHECK(sigma2(ctx, y) == doctest::Approx(4.0 / 9.0).epsilon(1e-11));
  // 0.25 (0.5 * 0.4 / 0.6 + 0.5 * 0.1 / 0.9)
  CHECK(c_correction(ctx, y) == doctest::Approx(7.0 / 72.0).epsilon(1e-11));
  CHECK(nu2(ctx, y) == doctest::Approx(4.0 / 9.0 - 7.0 / 72.0).epsilon(1e-11));
}

TEST_CASE("hand arithmetic at one half")
{
  const auto ctx = beta25_mar_model();
  // f(y) = 30 y (1 - y)^4, f'(0.5) = 30 (1/16 - 1/4)
  CHECK(bias_leading(ctx, 0.5) == doctest::Approx(-0.703125).epsilon(1e-13));
  const double v = std::sqrt(0.25 / std::numbers::pi) * 0.9375 * (0.5 / 0.6 + 0.5 / 0.9);
  CHECK(variance_correction(ctx, 0.5) == doctest::Approx(v).epsilon(1e-13));
  CHECK(v == doctest::Approx(0.36731).epsilon(1e-4));
  CHECK(bias_leading(ctx, 0.0) == 0.0);
  CHECK(variance_correction(ctx, 1.0) == 0.0);
}

TEST_CASE("density and derivative of the model against finite differences")
{
  const auto ctx = beta25_mar_model();
  for (double y : { 0.05, 0.2, 0.5, 0.8, 0.95 }) {
    const double h = 1e-5;
    CHECK(ctx.density(y) == doctest::Approx((beta25_cdf(y + h) - beta25_cdf(y - h)) / (2 * h)).epsilon(1e-8));
    CHECK(ctx.density_derivative(y) ==
          doctest::Approx((ctx.density(y + h) - ctx.density(y - h)) / (2 * h)).epsilon(1e-7));
    CHECK(ctx.density(y) == doctest::Approx(oracle::beta_pdf(y, 2.0, 5.0)).epsilon(1e-12));
  }
}

TEST_CASE("optimal degree against brute-force minimization")
{
  const auto ctx = beta25_mar_model();
  for (double y : { 0.1, 0.5, 0.7 }) {
    const double b = bias_leading(ctx, y);
    const double v = variance_correction(ctx, y);
    for (double n : { 1e3, 1e4, 1e5 }) {
      const double m = m_opt_pointwise(ctx, y, n);
      CHECK(std::abs(m - brute_force_degree(b, v, n)) <= 1.0);
    }
    CHECK(m_opt_pointwise(ctx, y, 8000.0) / m_opt_pointwise(ctx, y, 1000.0) == doctest::Approx(4.0).epsilon(1e-12));
  }
  CHECK(m_opt_pointwise(ctx, 0.5, 1000.0) == doctest::Approx(307.18).epsilon(1e-4));
  CHECK_THROWS_AS(m_opt_pointwise(uniform_mar_model(), 0.5, 1000.0), std::domain_error);
  CHECK_THROWS_AS(m_opt_global(uniform_mar_model(), 1000.0), std::domain_error);
  CHECK_THROWS_AS(theory_model("nope"), std::invalid_argument);
}

TEST_CASE("feasible and pseudo expansions differ by C / n")
{
  const auto ctx = beta25_mar_model();
  for (double y : { 0.1, 0.3, 0.6 }) {
    for (double n : { 100.0, 5000.0 }) {
      const double gap = mse_expansion(ctx, y, n, 50.0, EstimatorVariant::feasible) -
                         mse_expansion(ctx, y, n, 50.0, EstimatorVariant::pseudo);
      CHECK(gap == doctest::Approx(-c_correction(ctx, y) / n).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(mse_expansion(ctx, 0.5, 0.0, 5.0, EstimatorVariant::pseudo), std::invalid_argument);
}

TEST_CASE("global optimal degree minimizes the MISE expansion locally")
{
  const auto ctx = beta25_mar_model();
  for (double n : { 500.0, 5000.0 }) {
    const double m = m_opt_global(ctx, n);
    const double at = mise_expansion(ctx, n, m, EstimatorVariant::pseudo);
    CHECK(at < mise_expansion(ctx, n, 0.9 * m, EstimatorVariant::pseudo));
    CHECK(at < mise_expansion(ctx, n, 1.1 * m, EstimatorVariant::pseudo));
  }
}

TEST_CASE("covariance sum identity")
{
  CHECK(covariance_sum_check(1, 0.5) == doctest::Approx(-0.25).epsilon(1e-14));
  for (double y : { 0.1, 0.37 }) {
    // m = 1: E min(K, L) - y = y^2 - y
    CHECK(covariance_sum_check(1, y) == doctest::Approx(y * y - y).epsilon(1e-13));
    for (int m : { 5, 60, 700 }) {
      CHECK(covariance_sum_check(m, y) == doctest::Approx(covariance_sum_check(m, 1.0 - y)).epsilon(1e-10));
    }
  }
  // brute force for small m
  for (int m : { 2, 7, 15 }) {
    const double y = 0.3;
    long double total = 0.0L;
    for (int k = 0; k <= m; ++k) {
      for (int l = 0; l <= m; ++l) {
        total += oracle::binomial_pmf(m, k, y) * oracle::binomial_pmf(m, l, y) * (std::min(k, l) / static_cast<double>(m) - y);
      }
    }
    CHECK(covariance_sum_check(m, y) == doctest::Approx(static_cast<double>(total)).epsilon(1e-12));
  }
  for (double y : { 0.2, 0.5, 0.8 }) {
    auto rel_error = [y](int m) {
      const double target = -std::sqrt(y * (1.0 - y) / (std::numbers::pi * m));
      return std::abs(covariance_sum_check(m, y) / target - 1.0);
    };
    CHECK(rel_error(10000) < 0.02);
    double prev = INFINITY;
    for (int m : { 10, 100, 1000, 10000 }) {
      const double e = rel_error(m);
      CHECK(e < prev);
      prev = e;
    }
  }
  CHECK_THROWS_AS(covariance_sum_check(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(covariance_sum_check(3, 0.0), std::domain_error);
}

TEST_CASE("complete data reductions")
{
  const auto ctx = beta_mar_model(2.0, 5.0, { 1.0 }, { 1.0 });
  for (int g = 1; g < 20; ++g) {
    const double y = g / 20.0;
    const double f = beta25_cdf(y);
    CHECK(sigma2(ctx, y) == doctest::Approx(f * (1.0 - f)).epsilon(1e-11));
    CHECK(c_correction(ctx, y) == 0.0);
    CHECK(nu2(ctx, y) == doctest::Approx(sigma2(ctx, y)).epsilon(1e-14));
    CHECK(variance_correction(ctx, y) ==
          doctest::Approx(std::sqrt(y * (1.0 - y) / std::numbers::pi) * oracle::beta_pdf(y, 2.0, 5.0)).epsilon(1e-11));
  }
}

TEST_CASE("two forms of the feasible variance agree and the correction is nonnegative")
{
  const auto ctx = beta25_mar_model();
  for (int g = 0; g <= 100; ++g) {
    const double y = g / 100.0;
    CHECK(std::abs(nu2(ctx, y) - nu2_alternative(ctx, y)) < 1e-10);
    CHECK(c_correction(ctx, y) >= 0.0);
    CHECK(nu2(ctx, y) <= sigma2(ctx, y) + 1e-15);
  }
}

TEST_CASE("model validation")
{
  CHECK_THROWS_AS(beta_mar_model(2.0, 5.0, { 0.5, 0.4 }, { 0.6, 0.9 }), std::invalid_argument);
  CHECK_THROWS_AS(beta_mar_model(2.0, 5.0, { 0.5, 0.5 }, { 0.0, 0.9 }), std::invalid_argument);
  CHECK_THROWS_AS(beta_mar_model(-1.0, 5.0, { 1.0 }, { 1.0 }), std::invalid_argument);
  auto ctx = beta25_mar_model();
  ctx.cells[0].cdf = [](double y) { return y; };
  CHECK_THROWS_AS(ctx.validate(), std::invalid_argument);
}

#include "bernmar/theory.hpp"

#include "bernmar/bernstein.hpp"
#include "bernmar/quadrature.hpp"
#include "bernmar/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace bernmar {

void
TheoryContext::validate() const
{
  if (!cdf || !density || !density_derivative) {
    throw std::invalid_argument("theory context: marginal functions must be set");
  }
  if (cells.empty()) {
    throw std::invalid_argument("theory context: at least one covariate cell required");
  }
  double mass = 0.0;
  for (const auto& c : cells) {
    if (!(c.probability >= 0.0 && c.probability <= 1.0)) {
      throw std::invalid_argument("theory context: cell probability outside [0, 1]");
    }
    if (!(c.propensity > 0.0 && c.propensity <= 1.0)) {
      throw std::invalid_argument("theory context: propensity outside (0, 1]");
    }
    if (!c.cdf || !c.density) {
      throw std::invalid_argument("theory context: conditional functions must be set");
    }
    mass += c.probability;
  }
  if (std::abs(mass - 1.0) > 1e-10) {
    throw std::invalid_argument("theory context: cell probabilities must sum to 1");
  }
  if (std::abs(cdf(0.0)) > 1e-12 || std::abs(cdf(1.0) - 1.0) > 1e-12) {
    throw std::invalid_argument("theory context: F(0) = 0 and F(1) = 1 required");
  }
  for (int g = 0; g <= 100; ++g) {
    const double y = g / 100.0;
    double mixture = 0.0;
    for (const auto& c : cells) {
      mixture += c.probability * c.cdf(y);
    }
    if (std::abs(mixture - cdf(y)) > 1e-10) {
      throw std::invalid_argument("theory context: conditional CDFs do not mix to F at y = " +
                                  std::to_string(y));
    }
  }
}

TheoryContext
beta_mar_model(double alpha,
               double beta,
               std::vector<double> cell_probabilities,
               std::vector<double> propensities)
{
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("beta model: shape parameters must be positive");
  }
  if (cell_probabilities.size() != propensities.size()) {
    throw std::invalid_argument("beta model: one propensity per cell required");
  }
  const double log_norm = log_beta(alpha, beta);
  RealFunction cdf = [alpha, beta](double y) {
    return beta_cdf(std::clamp(y, 0.0, 1.0), alpha, beta);
  };
  RealFunction density = [alpha, beta, log_norm](double y) {
    if (y < 0.0 || y > 1.0) {
      return 0.0;
    }
    return std::exp(-log_norm) * std::pow(y, alpha - 1.0) * std::pow(1.0 - y, beta - 1.0);
  };
  // d/dy y^(a-1) (1-y)^(b-1) = [(a-1)(1-y) - (b-1) y] y^(a-2) (1-y)^(b-2)
  RealFunction derivative = [alpha, beta, log_norm](double y) {
    if (y <= 0.0 || y >= 1.0) {
      return 0.0;
    }
    return std::exp(-log_norm) * ((alpha - 1.0) * (1.0 - y) - (beta - 1.0) * y) *
           std::pow(y, alpha - 2.0) * std::pow(1.0 - y, beta - 2.0);
  };
  TheoryContext ctx{ cdf, density, derivative, {} };
  for (std::size_t c = 0; c < cell_probabilities.size(); ++c) {
    ctx.cells.push_back({ cell_probabilities[c], propensities[c], cdf, density });
  }
  ctx.validate();
  return ctx;
}

TheoryContext
beta25_mar_model()
{
  return beta_mar_model(2.0, 5.0, { 0.5, 0.5 }, { 0.6, 0.9 });
}

TheoryContext
uniform_mar_model()
{
  return beta_mar_model(1.0, 1.0, { 0.5, 0.5 }, { 0.6, 0.9 });
}

TheoryContext
theory_model(const std::string& name)
{
  if (name == "beta25-mar") {
    return beta25_mar_model();
  }
  if (name == "uniform") {
    return uniform_mar_model();
  }
  throw std::invalid_argument("unknown theory model '" + name + "' (expected beta25-mar or uniform)");
}

double
bias_leading(const TheoryContext& ctx, double y)
{
  if (y <= 0.0 || y >= 1.0) {
    return 0.0;
  }
  return 0.5 * y * (1.0 - y) * ctx.density_derivative(y);
}

double
sigma2(const TheoryContext& ctx, double y)
{
  double expectation = 0.0;
  for (const auto& c : ctx.cells) {
    expectation += c.probability * c.cdf(y) / c.propensity;
  }
  const double f = ctx.cdf(y);
  return expectation - f * f;
}

double
variance_correction(const TheoryContext& ctx, double y)
{
  if (y <= 0.0 || y >= 1.0) {
    return 0.0;
  }
  double expectation = 0.0;
  for (const auto& c : ctx.cells) {
    expectation += c.probability * c.density(y) / c.propensity;
  }
  return std::sqrt(y * (1.0 - y) / std::numbers::pi) * expectation;
}

double
c_correction(const TheoryContext& ctx, double y)
{
  double total = 0.0;
  for (const auto& c : ctx.cells) {
    const double fc = c.cdf(y);
    total += c.probability * (1.0 - c.propensity) / c.propensity * fc * fc;
  }
  return total;
}

double
nu2(const TheoryContext& ctx, double y)
{
  return sigma2(ctx, y) - c_correction(ctx, y);
}

double
nu2_alternative(const TheoryContext& ctx, double y)
{
  double total = 0.0;
  for (const auto& c : ctx.cells) {
    const double fc = c.cdf(y);
    total += c.probability * (fc * (1.0 - fc) / c.propensity + fc * fc);
  }
  const double f = ctx.cdf(y);
  return total - f * f;
}

namespace {

double
optimal_degree(double bias_square, double variance_term, double n)
{
  if (bias_square == 0.0 || variance_term == 0.0) {
    throw std::domain_error("optimal degree undefined: bias or variance term vanishes");
  }
  const double ratio = 4.0 * bias_square / variance_term;
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw std::domain_error("optimal degree undefined: 4 B^2 / V is not positive and finite");
  }
  return std::pow(n, 2.0 / 3.0) * std::pow(ratio, 2.0 / 3.0);
}

} // namespace

double
m_opt_pointwise(const TheoryContext& ctx, double y, double n)
{
  const double b = bias_leading(ctx, y);
  return optimal_degree(b * b, variance_correction(ctx, y), n);
}

double
m_opt_global(const TheoryContext& ctx, double n)
{
  const double b2 = integrate(
    [&](double y) {
      const double b = bias_leading(ctx, y);
      return b * b;
    },
    0.0,
    1.0);
  const double v = integrate([&](double y) { return variance_correction(ctx, y); }, 0.0, 1.0);
  return optimal_degree(b2, v, n);
}

double
mse_expansion(const TheoryContext& ctx, double y, double n, double m, EstimatorVariant variant)
{
  if (!(n >= 1.0) || !(m >= 1.0)) {
    throw std::invalid_argument("mse_expansion: need n >= 1 and m >= 1");
  }
  const double s = variant == EstimatorVariant::pseudo ? sigma2(ctx, y) : nu2(ctx, y);
  const double b = bias_leading(ctx, y);
  return s / n - variance_correction(ctx, y) / (n * std::sqrt(m)) + b * b / (m * m);
}

double
mise_expansion(const TheoryContext& ctx, double n, double m, EstimatorVariant variant)
{
  return integrate([&](double y) { return mse_expansion(ctx, y, n, m, variant); }, 0.0, 1.0);
}

double
covariance_sum_check(int m, double y)
{
  if (m < 1) {
    throw std::invalid_argument("covariance_sum_check: m must be at least 1");
  }
  if (!(y > 0.0 && y < 1.0)) {
    throw std::domain_error("covariance_sum_check: y must lie in (0, 1)");
  }
  std::vector<double> basis(static_cast<std::size_t>(m) + 1);
  bernstein_basis_all(m, y, basis);
  // P(min(K, L) = j) = S_j^2 - S_{j+1}^2 with S_j = P(K >= j)
  double total = 0.0;
  double survival_next = 0.0;
  for (int j = m; j >= 0; --j) {
    const double survival = survival_next + basis[static_cast<std::size_t>(j)];
    total += (knot(j, m) - y) * (survival * survival - survival_next * survival_next);
    survival_next = survival;
  }
  return total;
}

} // namespace bernmar

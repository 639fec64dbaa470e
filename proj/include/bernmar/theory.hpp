#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bernmar {

using RealFunction = std::function<double(double)>;

//! Analytic description of a MAR population with a discrete covariate.
//!
//! Holds the marginal CDF, density and density derivative of Y on [0, 1] and,
//! per covariate cell, the conditional CDF and density of Y, the propensity
//! and the cell probability.
struct TheoryContext
{
  struct Cell
  {
    double probability;
    double propensity;
    RealFunction cdf;
    RealFunction density;
  };

  RealFunction cdf;
  RealFunction density;
  RealFunction density_derivative;
  std::vector<Cell> cells;

  //! Throws std::invalid_argument on a violated invariant: cell
  //! probabilities summing to 1, propensities in (0, 1], F(0) = 0, F(1) = 1,
  //! and the mixture of the conditional CDFs matching F on a grid.
  void validate() const;
};

//! Y ~ Beta(alpha, beta) independent of a covariate with the given cell
//! probabilities and propensities.
TheoryContext beta_mar_model(double alpha,
                             double beta,
                             std::vector<double> cell_probabilities,
                             std::vector<double> propensities);

//! Beta(2, 5) response, X ~ Bernoulli(0.5), propensities (0.6, 0.9).
TheoryContext beta25_mar_model();

//! Uniform(0, 1) response with the same covariate design; its density is flat
//! so the leading bias vanishes.
TheoryContext uniform_mar_model();

//! Built-in models by name: "beta25-mar", "uniform". Throws
//! std::invalid_argument for anything else.
TheoryContext theory_model(const std::string& name);

//! B(y) = y (1 - y) f'(y) / 2.
double bias_leading(const TheoryContext& ctx, double y);

//! sigma^2(y) = E[F_{Y|X}(y) / pi(X)] - F(y)^2.
double sigma2(const TheoryContext& ctx, double y);

//! V(y) = sqrt(y (1 - y) / pi) E[f_{Y|X}(y) / pi(X)].
double variance_correction(const TheoryContext& ctx, double y);

//! C(y) = E[(1 - pi(X)) / pi(X) F_{Y|X}(y)^2].
double c_correction(const TheoryContext& ctx, double y);

//! nu^2(y) = sigma^2(y) - C(y).
double nu2(const TheoryContext& ctx, double y);

//! E[F_{Y|X}(1 - F_{Y|X}) / pi] + E[F_{Y|X}^2] - F^2; equals nu2.
double nu2_alternative(const TheoryContext& ctx, double y);

enum class EstimatorVariant
{
  pseudo,
  feasible
};

//! n^(2/3) (4 B(y)^2 / V(y))^(2/3). Throws std::domain_error when B(y) V(y) is
//! zero or when the ratio is not positive and finite.
double m_opt_pointwise(const TheoryContext& ctx, double y, double n);

//! n^(2/3) (4 int B^2 / int V)^(2/3); same errors as the pointwise form.
double m_opt_global(const TheoryContext& ctx, double n);

//! n^-1 s(y) - n^-1 m^-1/2 V(y) + m^-2 B(y)^2 with s = sigma^2 (pseudo) or
//! nu^2 (feasible).
double mse_expansion(const TheoryContext& ctx,
                     double y,
                     double n,
                     double m,
                     EstimatorVariant variant);

//! Integral over [0, 1] of the MSE expansion.
double mise_expansion(const TheoryContext& ctx, double n, double m, EstimatorVariant variant);

//! sum_{k,l} (min(k,l)/m - y) b_{m,k}(y) b_{m,l}(y), computed exactly in
//! O(m) from the survival sums of the binomial weights. For large m this is
//! close to -m^-1/2 sqrt(y (1-y) / pi).
double covariance_sum_check(int m, double y);

} // namespace bernmar

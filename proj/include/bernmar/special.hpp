#pragma once

namespace bernmar {

//! Natural logarithm of the gamma function for x > 0 (Lanczos, g = 7).
double log_gamma(double x);

//! ln B(p, q) for p, q > 0.
double log_beta(double p, double q);

//! ln C(n, k) for 0 <= k <= n.
double log_choose(int n, int k);

//! Regularized incomplete beta function I_x(alpha, beta), i.e. the CDF of a
//! Beta(alpha, beta) variable at x.
double beta_cdf(double x, double alpha, double beta);

//! Standard normal CDF.
double normal_cdf(double z);

//! Standard normal density.
double normal_pdf(double z);

//! Table-driven standard normal CDF for inner loops. Quintic Hermite
//! interpolation on [-8.5, 8.5]; absolute error below 1e-14, and the tails
//! are clamped to 0 and 1.
double fast_normal_cdf(double z);

} // namespace bernmar

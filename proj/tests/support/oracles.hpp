#pragma once

// Reference computations used only by the tests. Everything here is written
// without calling into the library so that library and oracle can disagree.

#include <array>
#include <cmath>
#include <vector>

namespace oracle {

//! Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], found
//! by Newton iteration on the Legendre recurrence.
struct GaussLegendre
{
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n)
  {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
      long double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      long double dp = 0.0L;
      for (int it = 0; it < 100; ++it) {
        long double p0 = 1.0L;
        long double p1 = x;
        for (int k = 2; k <= n; ++k) {
          const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0L);
        const long double dx = p1 / dp;
        x -= dx;
        if (std::fabs(static_cast<double>(dx)) < 1e-19) {
          break;
        }
      }
      nodes[i] = static_cast<double>(x);
      weights[i] = static_cast<double>(2.0L / ((1.0L - x * x) * dp * dp));
    }
  }
};

inline const GaussLegendre&
gl20()
{
  static const GaussLegendre rule(20);
  return rule;
}

//! Composite 20-point Gauss-Legendre quadrature over `panels` equal panels.
template<class F>
double
integrate(const F& f, double a, double b, int panels = 200)
{
  const auto& rule = gl20();
  const double width = (b - a) / panels;
  long double total = 0.0L;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      total += rule.weights[j] * f(mid + 0.5 * width * rule.nodes[j]);
    }
  }
  return static_cast<double>(total * 0.5L * width);
}

//! Beta(a, b) density from std::lgamma.
inline double
beta_pdf(double x, double a, double b)
{
  if (x <= 0.0 || x >= 1.0) {
    return 0.0;
  }
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  return std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
}

//! Binomial(m, y) probability of k in long double.
inline double
binomial_pmf(int m, int k, double y)
{
  if (y == 0.0) {
    return k == 0 ? 1.0 : 0.0;
  }
  if (y == 1.0) {
    return k == m ? 1.0 : 0.0;
  }
  const long double lc = std::lgamma(m + 1.0L) - std::lgamma(k + 1.0L) - std::lgamma(m - k + 1.0L);
  return static_cast<double>(
    std::exp(lc + k * std::log(static_cast<long double>(y)) +
             (m - k) * std::log1p(-static_cast<long double>(y))));
}

inline double
normal_pdf(double z)
{
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

//! Bernstein polynomial sum_k c_k b_{m,k}(y) by direct summation.
inline double
bernstein_sum(const std::vector<double>& coeffs, double y)
{
  const int m = static_cast<int>(coeffs.size()) - 1;
  long double total = 0.0L;
  for (int k = 0; k <= m; ++k) {
    total += coeffs[k] * binomial_pmf(m, k, y);
  }
  return static_cast<double>(total);
}

//! Weighted step CDF n^-1 sum_i w_i 1{y_i <= t} by a linear scan.
inline double
step_cdf(const std::vector<double>& ys, const std::vector<double>& ws, std::size_t n, double t)
{
  long double total = 0.0L;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (ys[i] <= t) {
      total += ws[i];
    }
  }
  return static_cast<double>(total / n);
}

} // namespace oracle

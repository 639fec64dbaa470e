#include "bernmar/lscv.hpp"

#include "bernmar/parallel.hpp"
#include "bernmar/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bernmar {

int
DegreeGrid::m_max(std::size_t n) const
{
  const double scaled = growth * std::pow(static_cast<double>(n), 2.0 / 3.0);
  // guard against pow() landing just below an exact integer
  const auto grown = static_cast<long long>(std::floor(scaled + 1e-9));
  long long m = std::min<long long>(grown, m_cap);
  m = std::min<long long>(m, static_cast<long long>(n));
  return static_cast<int>(std::max<long long>(m, 0));
}

std::vector<int>
DegreeGrid::resolve(std::size_t n) const
{
  if (m_min < 1) {
    throw std::invalid_argument("degree grid: m_min must be at least 1");
  }
  const int hi = m_max(n);
  if (hi < m_min) {
    throw std::invalid_argument("degree grid is empty for n = " + std::to_string(n));
  }
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(hi - m_min + 1));
  for (int m = m_min; m <= hi; ++m) {
    out.push_back(m);
  }
  return out;
}

double
lscv_term1(const BernsteinCdf& cdf)
{
  const int m = cdf.degree();
  const auto& f = cdf.coeffs();
  // log j! for j = 0..2m+1
  std::vector<double> log_fact(2 * static_cast<std::size_t>(m) + 2);
  for (std::size_t j = 0; j < log_fact.size(); ++j) {
    log_fact[j] = log_gamma(static_cast<double>(j) + 1.0);
  }
  std::vector<double> log_binom(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) {
    log_binom[static_cast<std::size_t>(k)] =
      log_fact[static_cast<std::size_t>(m)] - log_fact[static_cast<std::size_t>(k)] -
      log_fact[static_cast<std::size_t>(m - k)];
  }
  // B(k+l+1, 2m-k-l+1) = (k+l)! (2m-k-l)! / (2m+1)!
  const double log_norm = log_fact[2 * static_cast<std::size_t>(m) + 1];
  auto gram = [&](int k, int l) {
    const auto s = static_cast<std::size_t>(k + l);
    return std::exp(log_binom[static_cast<std::size_t>(k)] + log_binom[static_cast<std::size_t>(l)] +
                    log_fact[s] + log_fact[2 * static_cast<std::size_t>(m) - s] - log_norm);
  };

  double diagonal = 0.0;
  double off = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double fk = f[static_cast<std::size_t>(k)];
    if (fk == 0.0) {
      continue;
    }
    diagonal += fk * fk * gram(k, k);
    double row = 0.0;
    for (int l = k + 1; l <= m; ++l) {
      const double fl = f[static_cast<std::size_t>(l)];
      if (fl != 0.0) {
        row += fl * gram(k, l);
      }
    }
    off += fk * row;
  }
  return diagonal + 2.0 * off;
}

double
basis_tail_integral(int m, int k, double y0)
{
  if (m < 0 || k < 0 || k > m) {
    throw std::out_of_range("basis_tail_integral: need 0 <= k <= m");
  }
  if (!(y0 >= 0.0 && y0 <= 1.0)) {
    throw std::domain_error("basis_tail_integral: y0 must lie in [0, 1]");
  }
  return (1.0 - beta_cdf(y0, k + 1.0, m - k + 1.0)) / (m + 1.0);
}

double
lscv_term2(const WeightedEcdf& ecdf, const BernsteinCdf& full)
{
  const std::size_t n = ecdf.n();
  if (n < 2) {
    throw std::invalid_argument("lscv_term2: leave-one-out needs n >= 2");
  }
  const int m = full.degree();
  const auto& f = full.coeffs();
  const auto values = ecdf.values();
  const auto weights = ecdf.weights();
  const double dn = static_cast<double>(n);

  std::vector<double> basis(static_cast<std::size_t>(m) + 2);
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = values[i];
    const double w = weights[i];
    bernstein_basis_all(m + 1, y, basis);

    // first knot k0 with y <= k0 / m
    int k0 = std::clamp(static_cast<int>(std::ceil(y * m)), 0, m + 1);
    while (k0 > 0 && knot(k0 - 1, m) >= y) {
      --k0;
    }
    while (k0 <= m && knot(k0, m) < y) {
      ++k0;
    }

    // (m+1) int_y^1 b_{m,k} = P(Bin(m+1, y) <= k)
    double cumulative = 0.0;
    double full_integral = 0.0;
    double self_integral = 0.0;
    for (int k = 0; k <= m; ++k) {
      cumulative += basis[static_cast<std::size_t>(k)];
      full_integral += f[static_cast<std::size_t>(k)] * cumulative;
      if (k >= k0) {
        self_integral += cumulative;
      }
    }
    full_integral /= (m + 1.0);
    self_integral /= (m + 1.0);
    const double loo = (dn * full_integral - w * self_integral) / (dn - 1.0);
    total += w * loo;
  }
  return 2.0 * total / dn;
}

double
lscv_term2(const WeightedEcdf& ecdf, int m)
{
  return lscv_term2(ecdf, smooth(ecdf, m));
}

LscvPoint
lscv(const WeightedEcdf& ecdf, int m)
{
  const auto cdf = smooth(ecdf, m);
  const double t1 = lscv_term1(cdf);
  const double t2 = lscv_term2(ecdf, cdf);
  return { m, t1 - t2, t1, t2 };
}

LscvTrace
select_degree(const WeightedEcdf& ecdf, const DegreeGrid& grid, int workers)
{
  const auto degrees = grid.resolve(ecdf.n());
  LscvTrace trace;
  trace.points.resize(degrees.size());
  parallel_for(degrees.size(), workers, [&](std::size_t j) {
    trace.points[j] = lscv(ecdf, degrees[j]);
  });
  std::size_t best = 0;
  for (std::size_t j = 1; j < trace.points.size(); ++j) {
    if (trace.points[j].criterion < trace.points[best].criterion) {
      best = j;
    }
  }
  trace.selected = trace.points[best].m;
  trace.selected_criterion = trace.points[best].criterion;
  return trace;
}

} // namespace bernmar

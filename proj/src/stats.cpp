#include "bernmar/stats.hpp"

#include "bernmar/rng.hpp"
#include "bernmar/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bernmar::stats {

double
mean(std::span<const double> x)
{
  if (x.empty()) {
    throw std::invalid_argument("mean of an empty sample");
  }
  double total = 0.0;
  for (double v : x) {
    total += v;
  }
  return total / static_cast<double>(x.size());
}

double
variance(std::span<const double> x)
{
  if (x.size() < 2) {
    return 0.0;
  }
  const double mu = mean(x);
  double ss = 0.0;
  for (double v : x) {
    ss += (v - mu) * (v - mu);
  }
  return ss / static_cast<double>(x.size() - 1);
}

double
quantile(std::span<const double> x, double p)
{
  if (x.empty()) {
    throw std::invalid_argument("quantile of an empty sample");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("quantile level must lie in [0, 1]");
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double
median(std::span<const double> x)
{
  return quantile(x, 0.5);
}

double
interquartile_range(std::span<const double> x)
{
  return quantile(x, 0.75) - quantile(x, 0.25);
}

double
bootstrap_variance_se(std::span<const double> x, int resamples, std::uint64_t seed)
{
  if (x.size() < 2 || resamples < 2) {
    throw std::invalid_argument("bootstrap needs at least two values and two resamples");
  }
  Xoshiro256 rng(seed);
  std::vector<double> draw(x.size());
  std::vector<double> estimates;
  estimates.reserve(static_cast<std::size_t>(resamples));
  const auto n = static_cast<double>(x.size());
  for (int b = 0; b < resamples; ++b) {
    for (auto& v : draw) {
      const auto j = std::min(static_cast<std::size_t>(rng.uniform() * n), x.size() - 1);
      v = x[j];
    }
    estimates.push_back(variance(draw));
  }
  return std::sqrt(variance(estimates));
}

double
anderson_darling_normal(std::span<const double> x)
{
  if (x.empty()) {
    throw std::invalid_argument("Anderson-Darling statistic of an empty sample");
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  constexpr double eps = 1e-300;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lower = std::max(normal_cdf(sorted[i]), eps);
    const double upper = std::max(normal_cdf(-sorted[n - 1 - i]), eps);
    total += (2.0 * static_cast<double>(i) + 1.0) * (std::log(lower) + std::log(upper));
  }
  return -static_cast<double>(n) - total / static_cast<double>(n);
}

} // namespace bernmar::stats

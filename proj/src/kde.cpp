#include "bernmar/kde.hpp"

#include "bernmar/parallel.hpp"
#include "bernmar/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bernmar {

namespace {

// Beyond this many bandwidths Phi is 0 or 1 to double precision.
constexpr double kernel_cutoff = 8.5;

void
check_bandwidth(double h)
{
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("bandwidth must be positive and finite");
  }
}

double
denominator_for(const WeightedEcdf& points, KdeNormalization normalization)
{
  if (normalization == KdeNormalization::total_weight && points.total_weight() > 0.0) {
    return points.total_weight();
  }
  return static_cast<double>(points.n());
}

} // namespace

IntegratedKde::IntegratedKde(const WeightedEcdf& points, double h, KdeNormalization normalization)
  : values_(points.values().begin(), points.values().end())
  , weights_(points.weights().begin(), points.weights().end())
  , h_(h)
  , denominator_(denominator_for(points, normalization))
  , n_(points.n())
{
  check_bandwidth(h);
  cumulative_.resize(weights_.size());
  double run = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    run += weights_[i];
    cumulative_[i] = run;
  }
}

double
IntegratedKde::operator()(double y) const
{
  const double reach = kernel_cutoff * h_;
  // points far below y contribute their full weight
  const auto lo = std::upper_bound(values_.begin(), values_.end(), y - reach) - values_.begin();
  const auto hi = std::upper_bound(values_.begin(), values_.end(), y + reach) - values_.begin();
  double total = lo > 0 ? cumulative_[static_cast<std::size_t>(lo) - 1] : 0.0;
  for (auto i = lo; i < hi; ++i) {
    const auto j = static_cast<std::size_t>(i);
    total += weights_[j] * normal_cdf((y - values_[j]) / h_);
  }
  return total / denominator_;
}

std::vector<double>
BandwidthGrid::resolve() const
{
  if (count < 1) {
    throw std::invalid_argument("bandwidth grid is empty");
  }
  if (!(h_min > 0.0) || !(h_max >= h_min) || !std::isfinite(h_max)) {
    throw std::invalid_argument("bandwidth grid needs 0 < h_min <= h_max");
  }
  if (count == 1) {
    return { h_min };
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  const double lmin = std::log(h_min);
  const double step = (std::log(h_max) - lmin) / (count - 1);
  for (int j = 0; j < count; ++j) {
    out[static_cast<std::size_t>(j)] = std::exp(lmin + step * j);
  }
  out.front() = h_min;
  out.back() = h_max;
  return out;
}

double
kde_lscv(const WeightedEcdf& points, double h, KdeNormalization normalization, int quadrature_points)
{
  check_bandwidth(h);
  if (quadrature_points < 1) {
    throw std::invalid_argument("kde_lscv: quadrature needs at least one node");
  }
  if (points.empty()) {
    return 0.0;
  }
  if (points.n() < 2) {
    throw std::invalid_argument("kde_lscv: leave-one-out needs n >= 2");
  }
  const auto values = points.values();
  const auto weights = points.weights();
  const std::size_t k = values.size();
  const double denom = denominator_for(points, normalization);

  // coefficient of unit i in its own leave-one-out curve: w_i^2 / D_i
  std::vector<double> self_coef(k);
  std::vector<double> loo_coef(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double d_i =
      normalization == KdeNormalization::total_weight ? denom - weights[i] : denom - 1.0;
    const double inv = d_i > 0.0 ? 1.0 / d_i : 0.0;
    loo_coef[i] = weights[i] * inv;
    self_coef[i] = weights[i] * weights[i] * inv;
  }

  const auto g_count = static_cast<std::size_t>(quadrature_points);
  const double dz = 1.0 / static_cast<double>(quadrature_points);
  const double reach = kernel_cutoff * h;
  std::vector<double> kernel_sum(g_count);
  double self_total = 0.0;
  std::size_t lo = 0;
  std::size_t hi = 0;
  double below_weight = 0.0;
  double below_self = 0.0;
  for (std::size_t g = 0; g < g_count; ++g) {
    const double z = (static_cast<double>(g) + 0.5) * dz;
    while (lo < k && values[lo] <= z - reach) {
      below_weight += weights[lo];
      below_self += self_coef[lo];
      ++lo;
    }
    while (hi < k && values[hi] < z + reach) {
      ++hi;
    }
    double s = below_weight;
    double r = below_self;
    for (std::size_t j = lo; j < hi; ++j) {
      const double phi = fast_normal_cdf((z - values[j]) / h);
      s += weights[j] * phi;
      if (values[j] <= z) {
        r += self_coef[j] * phi;
      }
    }
    kernel_sum[g] = s;
    self_total += r;
  }

  double square = 0.0;
  for (double s : kernel_sum) {
    square += s * s;
  }
  square *= dz / (denom * denom);

  // suffix[g] = sum_{g' >= g} S(z_g')
  std::vector<double> suffix(g_count + 1, 0.0);
  for (std::size_t g = g_count; g-- > 0;) {
    suffix[g] = suffix[g + 1] + kernel_sum[g];
  }
  double cross = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    // first node z_g >= Y_i
    const double pos = values[i] * quadrature_points - 0.5;
    auto first = static_cast<std::size_t>(std::clamp(std::ceil(pos), 0.0, static_cast<double>(g_count)));
    while (first > 0 && (static_cast<double>(first - 1) + 0.5) * dz >= values[i]) {
      --first;
    }
    while (first < g_count && (static_cast<double>(first) + 0.5) * dz < values[i]) {
      ++first;
    }
    cross += loo_coef[i] * suffix[first];
  }
  cross = (cross - self_total) * dz;
  return square - 2.0 * cross / denom;
}

BandwidthTrace
select_bandwidth(const WeightedEcdf& points,
                 const BandwidthGrid& grid,
                 KdeNormalization normalization,
                 int workers)
{
  const auto hs = grid.resolve();
  BandwidthTrace trace;
  trace.points.resize(hs.size());
  parallel_for(hs.size(), workers, [&](std::size_t j) {
    trace.points[j] = { hs[j], kde_lscv(points, hs[j], normalization) };
  });
  std::size_t best = 0;
  for (std::size_t j = 1; j < trace.points.size(); ++j) {
    if (trace.points[j].criterion < trace.points[best].criterion) {
      best = j;
    }
  }
  trace.selected = trace.points[best].h;
  trace.selected_criterion = trace.points[best].criterion;
  return trace;
}

} // namespace bernmar

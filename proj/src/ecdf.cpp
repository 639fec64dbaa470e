#include "bernmar/ecdf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bernmar {

WeightedEcdf::WeightedEcdf(std::vector<WeightedPoint> points, std::size_t n)
  : n_(n)
{
  if (n_ == 0) {
    throw std::invalid_argument("WeightedEcdf: n must be at least 1");
  }
  std::erase_if(points, [](const WeightedPoint& p) {
    if (!(p.w >= 0.0) || !std::isfinite(p.w) || !std::isfinite(p.y)) {
      throw std::invalid_argument("WeightedEcdf: weights must be finite and nonnegative");
    }
    return p.w == 0.0;
  });
  if (points.size() > n_) {
    throw std::invalid_argument("WeightedEcdf: more weighted points than units");
  }
  std::stable_sort(points.begin(), points.end(), [](const WeightedPoint& a, const WeightedPoint& b) {
    return a.y < b.y;
  });
  values_.reserve(points.size());
  weights_.reserve(points.size());
  cumulative_.reserve(points.size());
  // Neumaier-compensated running sum
  double sum = 0.0;
  double comp = 0.0;
  for (const auto& p : points) {
    values_.push_back(p.y);
    weights_.push_back(p.w);
    const double t = sum + p.w;
    if (std::abs(sum) >= std::abs(p.w)) {
      comp += (sum - t) + p.w;
    } else {
      comp += (p.w - t) + sum;
    }
    sum = t;
    cumulative_.push_back(sum + comp);
  }
}

double
WeightedEcdf::operator()(double y) const
{
  const auto idx = std::upper_bound(values_.begin(), values_.end(), y) - values_.begin();
  if (idx == 0) {
    return 0.0;
  }
  return cumulative_[static_cast<std::size_t>(idx - 1)] / static_cast<double>(n_);
}

WeightedEcdf
WeightedEcdf::without(std::size_t i) const
{
  if (i >= values_.size()) {
    throw std::out_of_range("WeightedEcdf::without: index out of range");
  }
  if (n_ < 2) {
    throw std::invalid_argument("WeightedEcdf::without: need n >= 2");
  }
  std::vector<WeightedPoint> points;
  points.reserve(values_.size() - 1);
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (j != i) {
      points.push_back({ values_[j], weights_[j] });
    }
  }
  return WeightedEcdf(std::move(points), n_ - 1);
}

WeightedEcdf
weighted_ecdf(const Dataset& data, std::span<const double> unit_weights)
{
  if (unit_weights.size() != data.size()) {
    throw std::invalid_argument("weighted_ecdf: one weight per unit required");
  }
  std::vector<WeightedPoint> points;
  points.reserve(data.observed_count());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].observed()) {
      points.push_back({ *data[i].y, unit_weights[i] });
    }
  }
  return WeightedEcdf(std::move(points), data.size());
}

WeightedEcdf
ipw_ecdf(const Dataset& data, const PropensityModel& prop)
{
  const auto w = ipw_weights(data, prop);
  return weighted_ecdf(data, w);
}

} // namespace bernmar

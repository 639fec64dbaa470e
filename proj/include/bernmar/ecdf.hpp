#pragma once

#include "propensity.hpp"
#include "sample.hpp"

#include <span>
#include <vector>

namespace bernmar {

struct WeightedPoint
{
  double y;
  double w;
};

//! Inverse-probability-weighted empirical CDF
//!   F(y) = n^-1 sum_i w_i 1{Y_i <= y},
//! where n counts every unit, observed or not. Points are sorted once and the
//! cumulative weights stored, so evaluation is a binary search.
class WeightedEcdf
{
public:
  //! Points with zero weight are dropped; negative or non-finite weights
  //! throw std::invalid_argument. n must be >= 1.
  WeightedEcdf(std::vector<WeightedPoint> points, std::size_t n);

  //! Right-continuous step value at y.
  double operator()(double y) const;

  std::size_t n() const { return n_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  //! Sorted response values and their weights.
  std::span<const double> values() const { return values_; }
  std::span<const double> weights() const { return weights_; }

  //! Sum of the weights (n times the value at +infinity).
  double total_weight() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  double total_mass() const { return total_weight() / static_cast<double>(n_); }

  //! Same points with unit i (0-based index into `values()`) removed and n
  //! reduced by one.
  WeightedEcdf without(std::size_t i) const;

private:
  std::vector<double> values_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  std::size_t n_;
};

WeightedEcdf weighted_ecdf(const Dataset& data, std::span<const double> unit_weights);

//! IPW empirical CDF with the propensities of `prop` (pseudo estimator for a
//! known model, feasible estimator for an estimated one).
WeightedEcdf ipw_ecdf(const Dataset& data, const PropensityModel& prop);

} // namespace bernmar

#pragma once

#include "ecdf.hpp"

#include <vector>

namespace bernmar {

//! How the kernel sum is scaled.
//!   sample_size:  n^-1 sum_i W_i Phi((y - Y_i)/h)
//!   total_weight: (sum_i W_i)^-1 sum_i W_i Phi((y - Y_i)/h)
//! The two agree for feasible (estimated-propensity) weights, whose sum is n.
enum class KdeNormalization
{
  sample_size,
  total_weight
};

//! Integrated IPW Gaussian kernel estimator of a CDF.
class IntegratedKde
{
public:
  IntegratedKde(const WeightedEcdf& points,
                double h,
                KdeNormalization normalization = KdeNormalization::sample_size);

  double operator()(double y) const;

  double bandwidth() const { return h_; }
  double denominator() const { return denominator_; }
  std::size_t n() const { return n_; }

private:
  std::vector<double> values_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  double h_;
  double denominator_;
  std::size_t n_;
};

//! `count` log-spaced bandwidths in [h_min, h_max].
struct BandwidthGrid
{
  double h_min = 1e-3;
  double h_max = 1.0;
  int count = 40;

  std::vector<double> resolve() const;
};

struct BandwidthPoint
{
  double h;
  double criterion;
};

struct BandwidthTrace
{
  std::vector<BandwidthPoint> points;
  double selected = 0.0;
  double selected_criterion = 0.0;
};

//! Midpoint quadrature nodes per unit interval used by the criterion.
inline constexpr int kde_lscv_quadrature_points = 2048;

//! LSCV(h) = int_0^1 F_h^2 - (2/D) sum_i W_i int_{Y_i}^1 F_h^{(-i)},
//! both integrals by the midpoint rule on `quadrature_points` nodes. D is the
//! normalizing denominator; the leave-one-out curve drops unit i from the
//! kernel sum and from D (D - 1 for sample_size, D - W_i for total_weight).
double kde_lscv(const WeightedEcdf& points,
                double h,
                KdeNormalization normalization = KdeNormalization::sample_size,
                int quadrature_points = kde_lscv_quadrature_points);

//! Minimizes kde_lscv over the grid; ties go to the smaller bandwidth.
BandwidthTrace select_bandwidth(const WeightedEcdf& points,
                                const BandwidthGrid& grid = {},
                                KdeNormalization normalization = KdeNormalization::sample_size,
                                int workers = 1);

} // namespace bernmar

#pragma once

#include "bernstein.hpp"
#include "ecdf.hpp"

#include <vector>

namespace bernmar {

//! Candidate degrees {m_min, ..., m_max(n)} with
//!   m_max(n) = min(floor(growth * n^(2/3)), m_cap, n).
struct DegreeGrid
{
  int m_min = 1;
  int m_cap = 300;
  double growth = 3.0;

  int m_max(std::size_t n) const;
  //! Throws std::invalid_argument when the grid is empty or m_min < 1.
  std::vector<int> resolve(std::size_t n) const;
};

struct LscvPoint
{
  int m;
  double criterion;
  double term1;
  double term2;
};

//! Criterion values per candidate and the minimizer (ties go to the smaller
//! degree). Values omit the constant integral of F^2 and may be negative.
struct LscvTrace
{
  std::vector<LscvPoint> points;
  int selected = 0;
  double selected_criterion = 0.0;
};

//! Integral over [0,1] of the squared Bernstein polynomial,
//!   sum_{k,l} F_k F_l C(m,k) C(m,l) B(k+l+1, 2m-k-l+1),
//! with the combinatorial factors combined in log space. O(m^2).
double lscv_term1(const BernsteinCdf& cdf);

//! Integral of b_{m,k} over [y0, 1]: (1 - I_{y0}(k+1, m-k+1)) / (m+1).
double basis_tail_integral(int m, int k, double y0);

//! (2/n) sum_i W_i int_{Y_i}^1 F_{n,m}^{(-i)}(y) dy, using the leave-one-out
//! coefficients (n F(k/m) - W_i 1{Y_i <= k/m}) / (n - 1). `full` must be the
//! smoothing of `ecdf` at the degree being scored. Throws
//! std::invalid_argument when n < 2.
//!
//! The tail integrals for all k at once come from the cumulative binomial
//! identity 1 - I_y(k+1, m-k+1) = P(Bin(m+1, y) <= k), so each unit costs
//! O(m).
double lscv_term2(const WeightedEcdf& ecdf, const BernsteinCdf& full);
double lscv_term2(const WeightedEcdf& ecdf, int m);

//! Term 1 - Term 2 at degree m.
LscvPoint lscv(const WeightedEcdf& ecdf, int m);

//! Scores every degree of `grid` (resolved for ecdf.n()) and returns the
//! trace. Candidates are spread over `workers` threads; the result does not
//! depend on the worker count.
LscvTrace select_degree(const WeightedEcdf& ecdf, const DegreeGrid& grid = {}, int workers = 1);

} // namespace bernmar

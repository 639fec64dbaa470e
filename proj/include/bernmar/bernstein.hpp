#pragma once

#include "ecdf.hpp"

#include <span>
#include <vector>

namespace bernmar {

//! The knot k / m, computed identically everywhere it is needed.
inline double
knot(int k, int m)
{
  return static_cast<double>(k) / static_cast<double>(m);
}

//! b_{m,k}(y) = C(m,k) y^k (1-y)^(m-k). Direct product for m <= 60, log
//! space above.
double bernstein_basis(int m, int k, double y);

//! All m+1 basis values at y, written into `out` (size m + 1).
//!
//! The recurrence b_{k+1} = b_k (m-k)/(k+1) y/(1-y) is seeded with 1 at the
//! mode and run outwards in both directions; the result is divided by its
//! sum. The seed is the largest term, so nothing overflows, and tails that
//! underflow are exactly the ones that are negligible.
void bernstein_basis_all(int m, double y, std::span<double> out);

//! Bernstein polynomial sum_k coeffs[k] b_{m,k}(y) with coeffs[k] = F(k/m).
class BernsteinCdf
{
public:
  //! Requires at least two coefficients (degree >= 1).
  explicit BernsteinCdf(std::vector<double> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  //! O(m) evaluation without allocation; y is clamped to [0, 1].
  double operator()(double y) const;

  std::vector<double> evaluate(std::span<const double> ys) const;

private:
  std::vector<double> coeffs_;
};

//! Bernstein smoothing of a weighted ECDF: coeffs[k] = ecdf(k / m).
BernsteinCdf smooth(const WeightedEcdf& ecdf, int m);

} // namespace bernmar

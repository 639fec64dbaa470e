#pragma once

#include <cmath>

namespace bernmar {

namespace detail {

template<class F>
double
simpson_step(const F& f,
             double a,
             double b,
             double fa,
             double fm,
             double fb,
             double whole,
             double tol,
             int depth)
{
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

//! Adaptive Simpson quadrature of f over [a, b].
//!
//! The interval is pre-split into 16 panels so that integrands which are
//! nearly flat at the midpoint of [a, b] are not accepted prematurely.
template<class F>
double
integrate(const F& f, double a, double b, double tol = 1e-9, int max_depth = 20)
{
  constexpr int panels = 16;
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double hi = (p == panels - 1) ? b : lo + width;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fmid = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += detail::simpson_step(
      f, lo, hi, flo, fmid, fhi, whole, tol / panels, max_depth);
  }
  return total;
}

} // namespace bernmar

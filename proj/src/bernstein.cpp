#include "bernmar/bernstein.hpp"

#include "bernmar/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bernmar {

namespace {

int
basis_mode(int m, double y)
{
  const int mode = static_cast<int>(std::floor((m + 1) * y));
  return std::clamp(mode, 0, m);
}

} // namespace

double
bernstein_basis(int m, int k, double y)
{
  if (m < 0 || k < 0 || k > m) {
    throw std::out_of_range("bernstein_basis: need 0 <= k <= m");
  }
  if (!(y >= 0.0 && y <= 1.0)) {
    throw std::domain_error("bernstein_basis: y must lie in [0, 1]");
  }
  if (y == 0.0) {
    return k == 0 ? 1.0 : 0.0;
  }
  if (y == 1.0) {
    return k == m ? 1.0 : 0.0;
  }
  if (m <= 60) {
    double binom = 1.0;
    for (int j = 1; j <= k; ++j) {
      binom = binom * (m - k + j) / j;
    }
    return binom * std::pow(y, k) * std::pow(1.0 - y, m - k);
  }
  return std::exp(log_choose(m, k) + k * std::log(y) + (m - k) * std::log1p(-y));
}

void
bernstein_basis_all(int m, double y, std::span<double> out)
{
  if (m < 0 || out.size() != static_cast<std::size_t>(m) + 1) {
    throw std::invalid_argument("bernstein_basis_all: output must hold m + 1 values");
  }
  std::fill(out.begin(), out.end(), 0.0);
  if (y <= 0.0) {
    out[0] = 1.0;
    return;
  }
  if (y >= 1.0) {
    out[static_cast<std::size_t>(m)] = 1.0;
    return;
  }
  const int mode = basis_mode(m, y);
  const double ratio = y / (1.0 - y);
  double sum = 1.0;
  out[static_cast<std::size_t>(mode)] = 1.0;
  double b = 1.0;
  for (int k = mode; k < m; ++k) {
    b *= (m - k) / (k + 1.0) * ratio;
    if (b == 0.0) {
      break;
    }
    out[static_cast<std::size_t>(k) + 1] = b;
    sum += b;
  }
  b = 1.0;
  for (int k = mode; k > 0; --k) {
    b *= k / ((m - k + 1.0) * ratio);
    if (b == 0.0) {
      break;
    }
    out[static_cast<std::size_t>(k) - 1] = b;
    sum += b;
  }
  const double inv = 1.0 / sum;
  for (auto& v : out) {
    v *= inv;
  }
}

BernsteinCdf::BernsteinCdf(std::vector<double> coeffs)
  : coeffs_(std::move(coeffs))
{
  if (coeffs_.size() < 2) {
    throw std::invalid_argument("BernsteinCdf: degree must be at least 1");
  }
}

double
BernsteinCdf::operator()(double y) const
{
  const int m = degree();
  if (y <= 0.0) {
    return coeffs_.front();
  }
  if (y >= 1.0) {
    return coeffs_.back();
  }
  // Unnormalized weights seeded at the mode; divide by their sum at the end.
  const int mode = basis_mode(m, y);
  const double ratio = y / (1.0 - y);
  double weight_sum = 1.0;
  double value = coeffs_[static_cast<std::size_t>(mode)];
  double b = 1.0;
  for (int k = mode; k < m; ++k) {
    b *= (m - k) / (k + 1.0) * ratio;
    if (b == 0.0) {
      break;
    }
    weight_sum += b;
    value += b * coeffs_[static_cast<std::size_t>(k) + 1];
  }
  b = 1.0;
  for (int k = mode; k > 0; --k) {
    b *= k / ((m - k + 1.0) * ratio);
    if (b == 0.0) {
      break;
    }
    weight_sum += b;
    value += b * coeffs_[static_cast<std::size_t>(k) - 1];
  }
  return value / weight_sum;
}

std::vector<double>
BernsteinCdf::evaluate(std::span<const double> ys) const
{
  std::vector<double> out;
  out.reserve(ys.size());
  for (double y : ys) {
    out.push_back((*this)(y));
  }
  return out;
}

BernsteinCdf
smooth(const WeightedEcdf& ecdf, int m)
{
  if (m < 1) {
    throw std::invalid_argument("smooth: degree must be at least 1");
  }
  std::vector<double> coeffs(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) {
    coeffs[static_cast<std::size_t>(k)] = ecdf(knot(k, m));
  }
  return BernsteinCdf(std::move(coeffs));
}

} // namespace bernmar

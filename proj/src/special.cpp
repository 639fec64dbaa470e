#include "bernmar/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bernmar {

namespace {

constexpr std::array<double, 9> lanczos_coeffs = {
  0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
  771.32342877765313,   -176.61502916214059,   12.507343278686905,
  -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7
};

double
lanczos_log_gamma(double x)
{
  // Lanczos approximation of Gamma(x) for x >= 0.5, written for Gamma(x)
  // = Gamma(z + 1) with z = x - 1.
  const double z = x - 1.0;
  double series = lanczos_coeffs[0];
  for (std::size_t i = 1; i < lanczos_coeffs.size(); ++i) {
    series += lanczos_coeffs[i] / (z + static_cast<double>(i));
  }
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(series);
}

constexpr int beta_cf_max_iterations = 300;
constexpr double beta_cf_tolerance = 1e-14;
constexpr double tiny = 1e-300;

// Continued fraction for the incomplete beta function (modified Lentz).
double
beta_continued_fraction(double x, double a, double b)
{
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) {
    d = tiny;
  }
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= beta_cf_max_iterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) {
      d = tiny;
    }
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) {
      c = tiny;
    }
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) {
      d = tiny;
    }
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) {
      c = tiny;
    }
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < beta_cf_tolerance) {
      break;
    }
  }
  return h;
}

// Quintic Hermite table for Phi on [-8.5, 8.5].
constexpr double table_lo = -8.5;
constexpr double table_hi = 8.5;
constexpr int table_per_unit = 64;
constexpr double table_step = 1.0 / table_per_unit;
constexpr int table_size = static_cast<int>((table_hi - table_lo) * table_per_unit) + 1;

struct NormalTable
{
  // value, first and second derivative (scaled by step and step^2)
  std::array<double, table_size> f;
  std::array<double, table_size> d1;
  std::array<double, table_size> d2;

  NormalTable()
  {
    for (int j = 0; j < table_size; ++j) {
      const double z = table_lo + j * table_step;
      const double pdf = normal_pdf(z);
      f[j] = normal_cdf(z);
      d1[j] = pdf * table_step;
      d2[j] = -z * pdf * table_step * table_step;
    }
  }
};

const NormalTable&
normal_table()
{
  static const NormalTable table;
  return table;
}

} // namespace

double
log_gamma(double x)
{
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("log_gamma: argument must be positive and finite");
  }
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) -
           lanczos_log_gamma(1.0 - x);
  }
  return lanczos_log_gamma(x);
}

double
log_beta(double p, double q)
{
  if (!(p > 0.0) || !(q > 0.0)) {
    throw std::domain_error("log_beta: arguments must be positive");
  }
  return log_gamma(p) + log_gamma(q) - log_gamma(p + q);
}

double
log_choose(int n, int k)
{
  if (n < 0 || k < 0 || k > n) {
    throw std::domain_error("log_choose: need 0 <= k <= n");
  }
  if (k == 0 || k == n) {
    return 0.0;
  }
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double
beta_cdf(double x, double alpha, double beta)
{
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::domain_error("beta_cdf: shape parameters must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("beta_cdf: x must lie in [0, 1]");
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (x == 1.0) {
    return 1.0;
  }
  const double log_front =
    alpha * std::log(x) + beta * std::log1p(-x) - log_beta(alpha, beta);
  const double front = std::exp(log_front);
  if (x < (alpha + 1.0) / (alpha + beta + 2.0)) {
    return front * beta_continued_fraction(x, alpha, beta) / alpha;
  }
  return 1.0 - front * beta_continued_fraction(1.0 - x, beta, alpha) / beta;
}

double
normal_cdf(double z)
{
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double
normal_pdf(double z)
{
  constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double
fast_normal_cdf(double z)
{
  if (z <= table_lo) {
    return 0.0;
  }
  if (z >= table_hi) {
    return 1.0;
  }
  const auto& tab = normal_table();
  const double pos = (z - table_lo) * table_per_unit;
  int j = static_cast<int>(pos);
  if (j >= table_size - 1) {
    j = table_size - 2;
  }
  const double t = pos - j;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t3 * t;
  const double t5 = t4 * t;
  const double h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
  const double h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  const double h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  const double h21 = 0.5 * (t3 - 2.0 * t4 + t5);
  return h00 * tab.f[j] + h10 * tab.d1[j] + h20 * tab.d2[j] + h01 * tab.f[j + 1] +
         h11 * tab.d1[j + 1] + h21 * tab.d2[j + 1];
}

} // namespace bernmar

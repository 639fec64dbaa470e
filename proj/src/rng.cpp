#include "bernmar/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bernmar {

namespace {

constexpr std::uint64_t
rotl(std::uint64_t x, int k)
{
  return (x << k) | (x >> (64 - k));
}

} // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed)
{
  // fill the state from a SplitMix64 sequence so no seed gives the zero state
  std::uint64_t x = seed;
  for (auto& word : s_) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    word = z ^ (z >> 31);
  }
}

Xoshiro256::result_type
Xoshiro256::operator()()
{
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double
Xoshiro256::uniform()
{
  // (k + 1/2) 2^-53 for a 53-bit k: never 0, never 1
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double
Xoshiro256::normal()
{
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u;
  double v;
  double s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double
Xoshiro256::gamma(double shape)
{
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::invalid_argument("gamma: shape must be positive and finite");
  }
  if (shape < 1.0) {
    // shape boost: Gamma(a) = Gamma(a + 1) U^(1/a) in law
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) {
      return d * v;
    }
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

double
Xoshiro256::beta(double alpha, double beta)
{
  const double x = gamma(alpha);
  const double y = gamma(beta);
  return x / (x + y);
}

} // namespace bernmar

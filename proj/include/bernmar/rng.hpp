#pragma once

#include <cstdint>
#include <limits>

namespace bernmar {

//! SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t
splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

//! Seed of the stream for (base seed, sample size, replication). Streams
//! depend only on these three counters, never on scheduling.
constexpr std::uint64_t
stream_seed(std::uint64_t base, std::uint64_t n, std::uint64_t replication)
{
  return splitmix64(splitmix64(splitmix64(base) ^ n) ^ replication);
}

//! xoshiro256** generator; satisfies UniformRandomBitGenerator.
class Xoshiro256
{
public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  //! Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  //! Standard normal (Marsaglia polar method).
  double normal();
  //! Gamma(shape, 1) by Marsaglia-Tsang; shape > 0.
  double gamma(double shape);
  //! Beta(alpha, beta) as a ratio of gammas.
  double beta(double alpha, double beta);
  bool bernoulli(double p) { return uniform() < p; }

private:
  std::uint64_t s_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

} // namespace bernmar

#pragma once

#include <cstdint>
#include <span>

namespace bernmar::stats {

double mean(std::span<const double> x);

//! Sample variance with the n - 1 denominator; 0 for fewer than two values.
double variance(std::span<const double> x);

//! Linear-interpolation quantile (Hyndman-Fan type 7).
double quantile(std::span<const double> x, double p);

double median(std::span<const double> x);

double interquartile_range(std::span<const double> x);

//! Standard error of the sample variance by the nonparametric bootstrap.
double bootstrap_variance_se(std::span<const double> x, int resamples, std::uint64_t seed);

//! Anderson-Darling statistic A^2 of x against the standard normal.
double anderson_darling_normal(std::span<const double> x);

} // namespace bernmar::stats

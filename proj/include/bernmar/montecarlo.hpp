#pragma once

#include "kde.hpp"
#include "lscv.hpp"
#include "propensity.hpp"
#include "sample.hpp"
#include "theory.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bernmar {

//! Y ~ Beta(alpha, beta); X takes value c with probability cell_probs[c];
//! delta ~ Bernoulli(propensities[X]) independently of Y given X.
struct MarDgp
{
  double alpha = 2.0;
  double beta = 5.0;
  std::vector<double> cell_probs{ 0.5, 0.5 };
  std::vector<double> propensities{ 0.6, 0.9 };

  //! Every unit observed (propensity 1 in every cell).
  static MarDgp complete_data();

  double cdf(double y) const;
  PropensityModel true_propensity() const;
  TheoryContext theory() const;
  void validate() const;
};

struct GeneratedSample
{
  Dataset data;
  std::vector<double> complete_y; // responses before deletion
};

GeneratedSample generate_with_complete(const MarDgp& dgp, std::size_t n, std::uint64_t seed);

//! n iid units from the MAR design; bit-identical for identical seeds.
Dataset generate(const MarDgp& dgp, std::size_t n, std::uint64_t seed);

//! G^-1 sum_g (estimate(y_g) - truth(y_g))^2 over the midpoints
//! y_g = (g - 1/2) / G.
template<class Estimate, class Truth>
double
ise(const Estimate& estimate, const Truth& truth, int grid_size)
{
  double total = 0.0;
  for (int g = 0; g < grid_size; ++g) {
    const double y = (g + 0.5) / grid_size;
    const double d = estimate(y) - truth(y);
    total += d * d;
  }
  return total / grid_size;
}

enum class EstimatorId
{
  pseudo_unsmoothed,
  pseudo_bernstein,
  pseudo_kde,
  feasible_unsmoothed,
  feasible_bernstein,
  feasible_kde
};

std::string to_string(EstimatorId id);

//! Accepts a single estimator name ("feasible-bernstein", ...) or a family:
//! "all", "pseudo-all", "feasible-all". Comma-separated lists are allowed.
std::vector<EstimatorId> parse_roster(const std::string& text);

struct SimConfig
{
  std::vector<std::size_t> sample_sizes{ 25, 50, 100, 200, 400, 800, 1600, 3200, 6400 };
  int reps = 100;
  int grid_size = 512;
  MarDgp dgp{};
  std::vector<EstimatorId> roster = parse_roster("all");
  std::uint64_t base_seed = 0;
  int workers = 1;
  DegreeGrid degree_grid{};
  BandwidthGrid bandwidth_grid{};
  KdeNormalization kde_normalization = KdeNormalization::total_weight;

  void validate() const;
};

//! ISE distribution of one estimator at one sample size. `ise_values` are the
//! successful replications in replication order; failed replications are
//! counted in `failures` and excluded from the statistics.
struct IseSummary
{
  std::size_t n = 0;
  EstimatorId estimator{};
  int successes = 0;
  int failures = 0;
  double median = 0.0;
  double iqr = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  //! Median selected degree (Bernstein) or bandwidth (KDE); 0 otherwise.
  double median_tuning = 0.0;
  std::vector<double> ise_values;
  std::vector<double> tuning_values;
};

struct StudyResult
{
  std::vector<IseSummary> summaries; // ordered by (n, roster position)
  double wall_clock_seconds = 0.0;

  const IseSummary& at(std::size_t n, EstimatorId estimator) const;
};

//! Runs every (n, replication) of the study: generate, fit each rostered
//! estimator with its own LSCV selection, compute the ISE. Replication r at
//! sample size n uses stream_seed(base_seed, n, r), so results are identical
//! for any worker count.
StudyResult run_study(const SimConfig& config);

//! How the Bernstein degree depends on n in the pointwise studies.
struct DegreeRule
{
  enum class Kind
  {
    fixed,            // m = value
    two_thirds_power, // m = ceil(n^(2/3))
    lambda_drift      // m = ceil(sqrt(n) / value)
  };
  Kind kind = Kind::two_thirds_power;
  double value = 0.0;

  int degree(std::size_t n) const;
};

struct PointStudyConfig
{
  MarDgp dgp{};
  std::size_t n = 800;
  int reps = 500;
  DegreeRule degree{};
  std::vector<double> ys{ 0.5 };
  std::uint64_t base_seed = 0;
  int workers = 1;
};

//! Smoothed estimates at fixed points across replications, indexed
//! [y][replication]. Both variants are computed from the same datasets.
//! A replication with an unobserved cell makes the feasible estimate
//! undefined; such replications are dropped from both variants and counted.
struct PointStudy
{
  int degree = 0;
  std::vector<std::vector<double>> pseudo;
  std::vector<std::vector<double>> feasible;
  int failures = 0;
};

PointStudy collect_point_estimates(const PointStudyConfig& config);

struct NormalityResult
{
  double y = 0.0;
  double scale = 0.0; // sigma(y) for pseudo, nu(y) for feasible
  std::vector<double> draws;
  double mean = 0.0;
  double variance = 0.0;
  double anderson_darling = 0.0;
};

//! Standardized draws sqrt(n) (F_{n,m}(y) - F(y)) / scale per requested y,
//! with summary moments and the Anderson-Darling statistic against N(0, 1).
//! Throws std::domain_error if the scale is zero at a requested y.
std::vector<NormalityResult> normality_check(const PointStudyConfig& config,
                                             EstimatorVariant variant);

} // namespace bernmar

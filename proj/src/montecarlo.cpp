#include "bernmar/montecarlo.hpp"

#include "bernmar/bernstein.hpp"
#include "bernmar/ecdf.hpp"
#include "bernmar/error.hpp"
#include "bernmar/parallel.hpp"
#include "bernmar/rng.hpp"
#include "bernmar/special.hpp"
#include "bernmar/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

namespace bernmar {

MarDgp
MarDgp::complete_data()
{
  MarDgp dgp;
  dgp.propensities = { 1.0, 1.0 };
  return dgp;
}

void
MarDgp::validate() const
{
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw InputError("dgp: Beta shape parameters must be positive");
  }
  if (cell_probs.empty() || cell_probs.size() != propensities.size()) {
    throw InputError("dgp: need one propensity per covariate cell");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < cell_probs.size(); ++c) {
    if (!(cell_probs[c] >= 0.0)) {
      throw InputError("dgp: negative cell probability");
    }
    if (!(propensities[c] > 0.0 && propensities[c] <= 1.0)) {
      throw InputError("dgp: propensities must lie in (0, 1]");
    }
    total += cell_probs[c];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InputError("dgp: cell probabilities must sum to 1");
  }
}

double
MarDgp::cdf(double y) const
{
  return beta_cdf(std::clamp(y, 0.0, 1.0), alpha, beta);
}

PropensityModel
MarDgp::true_propensity() const
{
  std::map<CellCode, double> probs;
  for (std::size_t c = 0; c < propensities.size(); ++c) {
    probs[static_cast<CellCode>(c)] = propensities[c];
  }
  return known_propensity(probs);
}

TheoryContext
MarDgp::theory() const
{
  return beta_mar_model(alpha, beta, cell_probs, propensities);
}

GeneratedSample
generate_with_complete(const MarDgp& dgp, std::size_t n, std::uint64_t seed)
{
  dgp.validate();
  if (n == 0) {
    throw InputError("generate: n must be positive");
  }
  Xoshiro256 rng(seed);
  std::vector<double> cumulative(dgp.cell_probs.size());
  std::partial_sum(dgp.cell_probs.begin(), dgp.cell_probs.end(), cumulative.begin());
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < cumulative.size(); ++c) {
    labels.push_back(std::to_string(c));
  }

  std::vector<Sample> samples;
  samples.reserve(n);
  std::vector<double> complete(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    auto cell = static_cast<std::size_t>(
      std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    cell = std::min(cell, cumulative.size() - 1);
    const double y = rng.beta(dgp.alpha, dgp.beta);
    const bool observed = rng.bernoulli(dgp.propensities[cell]);
    complete[i] = y;
    samples.push_back(Sample{ observed ? std::optional<double>(y) : std::nullopt,
                              static_cast<CellCode>(cell) });
  }
  return { Dataset(std::move(samples), std::move(labels)), std::move(complete) };
}

Dataset
generate(const MarDgp& dgp, std::size_t n, std::uint64_t seed)
{
  return generate_with_complete(dgp, n, seed).data;
}

namespace {

struct EstimatorName
{
  EstimatorId id;
  const char* name;
};

constexpr EstimatorName estimator_names[] = {
  { EstimatorId::pseudo_unsmoothed, "pseudo-unsmoothed" },
  { EstimatorId::pseudo_bernstein, "pseudo-bernstein" },
  { EstimatorId::pseudo_kde, "pseudo-kde" },
  { EstimatorId::feasible_unsmoothed, "feasible-unsmoothed" },
  { EstimatorId::feasible_bernstein, "feasible-bernstein" },
  { EstimatorId::feasible_kde, "feasible-kde" },
};

bool
is_pseudo(EstimatorId id)
{
  return id == EstimatorId::pseudo_unsmoothed || id == EstimatorId::pseudo_bernstein ||
         id == EstimatorId::pseudo_kde;
}

std::string
trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

} // namespace

std::string
to_string(EstimatorId id)
{
  for (const auto& e : estimator_names) {
    if (e.id == id) {
      return e.name;
    }
  }
  return "unknown";
}

std::vector<EstimatorId>
parse_roster(const std::string& text)
{
  std::vector<EstimatorId> out;
  auto add = [&](EstimatorId id) {
    if (std::find(out.begin(), out.end(), id) == out.end()) {
      out.push_back(id);
    }
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string token =
      trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    start = comma == std::string::npos ? text.size() + 1 : comma + 1;
    if (token.empty()) {
      continue;
    }
    if (token == "all" || token == "pseudo-all" || token == "feasible-all") {
      for (const auto& e : estimator_names) {
        const bool pseudo = is_pseudo(e.id);
        if (token == "all" || (token == "pseudo-all") == pseudo) {
          add(e.id);
        }
      }
      continue;
    }
    bool found = false;
    for (const auto& e : estimator_names) {
      if (token == e.name) {
        add(e.id);
        found = true;
      }
    }
    if (!found) {
      throw InputError("unknown estimator '" + token + "'");
    }
  }
  if (out.empty()) {
    throw InputError("estimator roster is empty");
  }
  return out;
}

void
SimConfig::validate() const
{
  if (sample_sizes.empty()) {
    throw InputError("simulation needs at least one sample size");
  }
  for (auto n : sample_sizes) {
    if (n < 2) {
      throw InputError("sample sizes must be at least 2");
    }
  }
  if (reps < 1) {
    throw InputError("replication count must be at least 1");
  }
  if (grid_size < 2) {
    throw InputError("ISE grid size must be at least 2");
  }
  if (roster.empty()) {
    throw InputError("estimator roster is empty");
  }
  dgp.validate();
  bandwidth_grid.resolve();
}

const IseSummary&
StudyResult::at(std::size_t n, EstimatorId estimator) const
{
  for (const auto& s : summaries) {
    if (s.n == n && s.estimator == estimator) {
      return s;
    }
  }
  throw std::out_of_range("no summary for n = " + std::to_string(n) + ", " + to_string(estimator));
}

namespace {

struct Outcome
{
  bool ok = false;
  double ise = 0.0;
  double tuning = 0.0;
};

Outcome
fit_one(EstimatorId id,
        const Dataset& data,
        const PropensityModel& truth_model,
        const std::optional<PropensityModel>& estimated,
        const SimConfig& config)
{
  if (!is_pseudo(id) && !estimated) {
    return {};
  }
  const auto ecdf = ipw_ecdf(data, is_pseudo(id) ? truth_model : *estimated);
  const MarDgp& dgp = config.dgp;
  auto truth = [&dgp](double y) { return dgp.cdf(y); };
  switch (id) {
    case EstimatorId::pseudo_unsmoothed:
    case EstimatorId::feasible_unsmoothed:
      return { true, ise(ecdf, truth, config.grid_size), 0.0 };
    case EstimatorId::pseudo_bernstein:
    case EstimatorId::feasible_bernstein: {
      const auto trace = select_degree(ecdf, config.degree_grid);
      const auto cdf = smooth(ecdf, trace.selected);
      return { true, ise(cdf, truth, config.grid_size), static_cast<double>(trace.selected) };
    }
    case EstimatorId::pseudo_kde:
    case EstimatorId::feasible_kde: {
      const auto trace = select_bandwidth(ecdf, config.bandwidth_grid, config.kde_normalization);
      const IntegratedKde kde(ecdf, trace.selected, config.kde_normalization);
      return { true, ise(kde, truth, config.grid_size), trace.selected };
    }
  }
  return {};
}

double
nan()
{
  return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

StudyResult
run_study(const SimConfig& config)
{
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto truth_model = config.dgp.true_propensity();
  const std::size_t reps = static_cast<std::size_t>(config.reps);
  const std::size_t est_count = config.roster.size();
  const std::size_t units = config.sample_sizes.size() * reps;

  // outcomes[unit][estimator]; unit = size index * reps + replication
  std::vector<std::vector<Outcome>> outcomes(units);
  parallel_for(units, config.workers, [&](std::size_t u) {
    const std::size_t n = config.sample_sizes[u / reps];
    const std::size_t rep = u % reps;
    const auto data = generate(config.dgp, n, stream_seed(config.base_seed, n, rep));
    std::optional<PropensityModel> estimated;
    try {
      estimated = estimate_propensity(data);
    } catch (const EstimationError&) {
      estimated.reset();
    }
    auto& row = outcomes[u];
    row.resize(est_count);
    for (std::size_t e = 0; e < est_count; ++e) {
      try {
        row[e] = fit_one(config.roster[e], data, truth_model, estimated, config);
      } catch (const EstimationError&) {
        row[e] = {};
      }
    }
  });

  StudyResult result;
  for (std::size_t s = 0; s < config.sample_sizes.size(); ++s) {
    for (std::size_t e = 0; e < est_count; ++e) {
      IseSummary summary;
      summary.n = config.sample_sizes[s];
      summary.estimator = config.roster[e];
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& o = outcomes[s * reps + r][e];
        if (o.ok) {
          ++summary.successes;
          summary.ise_values.push_back(o.ise);
          summary.tuning_values.push_back(o.tuning);
        } else {
          ++summary.failures;
        }
      }
      if (summary.successes > 0) {
        summary.median = stats::median(summary.ise_values);
        summary.iqr = stats::interquartile_range(summary.ise_values);
        summary.mean = stats::mean(summary.ise_values);
        summary.variance = stats::variance(summary.ise_values);
        summary.median_tuning = stats::median(summary.tuning_values);
      } else {
        summary.median = summary.iqr = summary.mean = summary.variance = nan();
        summary.median_tuning = nan();
      }
      result.summaries.push_back(std::move(summary));
    }
  }
  result.wall_clock_seconds =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

int
DegreeRule::degree(std::size_t n) const
{
  const auto dn = static_cast<double>(n);
  double m = 0.0;
  switch (kind) {
    case Kind::fixed:
      m = value;
      break;
    case Kind::two_thirds_power:
      m = std::ceil(std::pow(dn, 2.0 / 3.0) - 1e-9);
      break;
    case Kind::lambda_drift:
      if (!(value > 0.0)) {
        throw InputError("lambda-drift degree rule needs lambda > 0");
      }
      m = std::ceil(std::sqrt(dn) / value - 1e-9);
      break;
  }
  if (!(m >= 1.0) || m > 1e7) {
    throw InputError("degree rule gives an invalid degree");
  }
  return static_cast<int>(m);
}

PointStudy
collect_point_estimates(const PointStudyConfig& config)
{
  config.dgp.validate();
  if (config.reps < 1 || config.n < 2 || config.ys.empty()) {
    throw InputError("point study needs reps >= 1, n >= 2 and at least one y");
  }
  PointStudy study;
  study.degree = config.degree.degree(config.n);
  const auto truth_model = config.dgp.true_propensity();
  const auto reps = static_cast<std::size_t>(config.reps);
  const std::size_t ny = config.ys.size();

  struct Draw
  {
    bool ok = false;
    std::vector<double> pseudo;
    std::vector<double> feasible;
  };
  std::vector<Draw> draws(reps);
  parallel_for(reps, config.workers, [&](std::size_t r) {
    const auto data = generate(config.dgp, config.n, stream_seed(config.base_seed, config.n, r));
    auto& d = draws[r];
    try {
      const auto estimated = estimate_propensity(data);
      const auto pseudo = smooth(ipw_ecdf(data, truth_model), study.degree);
      const auto feasible = smooth(ipw_ecdf(data, estimated), study.degree);
      d.pseudo = pseudo.evaluate(config.ys);
      d.feasible = feasible.evaluate(config.ys);
      d.ok = true;
    } catch (const EstimationError&) {
      d.ok = false;
    }
  });

  study.pseudo.assign(ny, {});
  study.feasible.assign(ny, {});
  for (const auto& d : draws) {
    if (!d.ok) {
      ++study.failures;
      continue;
    }
    for (std::size_t j = 0; j < ny; ++j) {
      study.pseudo[j].push_back(d.pseudo[j]);
      study.feasible[j].push_back(d.feasible[j]);
    }
  }
  return study;
}

std::vector<NormalityResult>
normality_check(const PointStudyConfig& config, EstimatorVariant variant)
{
  const auto ctx = config.dgp.theory();
  std::vector<double> scales;
  for (double y : config.ys) {
    const double s2 = variant == EstimatorVariant::pseudo ? sigma2(ctx, y) : nu2(ctx, y);
    if (!(s2 > 0.0)) {
      throw std::domain_error("normality check: asymptotic variance is zero at y = " +
                              std::to_string(y));
    }
    scales.push_back(std::sqrt(s2));
  }
  const auto study = collect_point_estimates(config);
  const double root_n = std::sqrt(static_cast<double>(config.n));
  std::vector<NormalityResult> out;
  for (std::size_t j = 0; j < config.ys.size(); ++j) {
    NormalityResult res;
    res.y = config.ys[j];
    res.scale = scales[j];
    const double truth = config.dgp.cdf(res.y);
    const auto& estimates =
      variant == EstimatorVariant::pseudo ? study.pseudo[j] : study.feasible[j];
    for (double v : estimates) {
      res.draws.push_back(root_n * (v - truth) / res.scale);
    }
    if (!res.draws.empty()) {
      res.mean = stats::mean(res.draws);
      res.variance = stats::variance(res.draws);
      res.anderson_darling = stats::anderson_darling_normal(res.draws);
    }
    out.push_back(std::move(res));
  }
  return out;
}

} // namespace bernmar

#include "bernmar/cli.hpp"

#include "bernmar/bernstein.hpp"
#include "bernmar/ecdf.hpp"
#include "bernmar/error.hpp"
#include "bernmar/kde.hpp"
#include "bernmar/lscv.hpp"
#include "bernmar/montecarlo.hpp"
#include "bernmar/propensity.hpp"
#include "bernmar/sample.hpp"
#include "bernmar/theory.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <utility>

#ifndef BERNMAR_VERSION
#define BERNMAR_VERSION "0.0.0"
#endif

namespace bernmar {

const char*
version()
{
  return BERNMAR_VERSION;
}

namespace {

using json = nlohmann::ordered_json;

std::string
format_double(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double
parse_double(const std::string& text, const std::string& what)
{
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InputError("cannot parse " + what + " '" + text + "'");
  }
  return v;
}

//! Writes to a file when a path is given, otherwise to the fallback stream.
class Sink
{
public:
  Sink(const std::string& path, std::ostream& fallback)
  {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) {
      throw InputError("cannot write '" + path + "'");
    }
    stream_ = file_.get();
  }

  std::ostream& stream() { return *stream_; }

private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

void
write_manifest(const std::string& path, const json& manifest)
{
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write manifest '" + path + "'");
  }
  out << manifest.dump(2) << '\n';
}

//! Manifest path: explicit flag, else next to the output file, else none.
std::string
manifest_path(const std::string& explicit_path, const std::string& output)
{
  if (!explicit_path.empty()) {
    return explicit_path;
  }
  if (!output.empty() && output != "-") {
    return output + ".manifest.json";
  }
  return {};
}

struct DataOptions
{
  std::string input;
  std::string y_col = "y";
  std::vector<std::string> x_cols{ "x" };
  std::string delta_col = "delta";
  double rescale_a = std::nan("");
  double rescale_b = std::nan("");
  std::vector<std::string> known;
  std::string propensity_file;
};

void
add_data_options(CLI::App& cmd, DataOptions& opt)
{
  cmd.add_option("--input,-i", opt.input, "input CSV (header row required)")->required();
  cmd.add_option("--y-col", opt.y_col, "response column")->capture_default_str();
  cmd.add_option("--x-col", opt.x_cols, "covariate column(s); several are crossed")
    ->capture_default_str();
  cmd.add_option("--delta-col", opt.delta_col, "observation flag column")->capture_default_str();
  cmd.add_option("--rescale-a", opt.rescale_a, "lower cap of the response in original units");
  cmd.add_option("--rescale-b", opt.rescale_b, "upper cap of the response in original units");
  cmd.add_option("--propensity,--propensity-known",
                 opt.known,
                 "known propensity as cell=prob (cell 'all' sets every cell); repeatable");
  cmd.add_option("--propensity-file", opt.propensity_file, "two-column CSV: cell,propensity");
}

Dataset
load_data(const DataOptions& opt)
{
  const bool has_a = !std::isnan(opt.rescale_a);
  const bool has_b = !std::isnan(opt.rescale_b);
  if (has_a != has_b) {
    throw InputError("--rescale-a and --rescale-b must be given together");
  }
  std::optional<RescaleSpec> spec;
  if (has_a) {
    spec = RescaleSpec(opt.rescale_a, opt.rescale_b);
  }
  ColumnMap columns;
  columns.y = opt.y_col;
  columns.x = opt.x_cols;
  columns.delta = opt.delta_col;
  return ingest_csv(opt.input, columns, spec);
}

std::vector<std::string>
read_propensity_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open propensity file '" + path + "'");
  }
  std::vector<std::string> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_csv_line(line);
    if (fields.size() == 1 && fields[0].empty()) {
      continue;
    }
    if (fields.size() != 2) {
      throw InputError("propensity file line " + std::to_string(line_no) +
                       ": expected two columns");
    }
    double v = 0.0;
    const auto& p = fields[1];
    auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
    if (line_no == 1 && (ec != std::errc() || ptr != p.data() + p.size())) {
      continue; // header row
    }
    items.push_back(fields[0] + "=" + fields[1]);
  }
  return items;
}

//! Known model from cell=prob items, or the estimated model when none given.
PropensityModel
build_propensity(const Dataset& data, const DataOptions& opt)
{
  std::vector<std::string> items = opt.known;
  if (!opt.propensity_file.empty()) {
    const auto from_file = read_propensity_file(opt.propensity_file);
    items.insert(items.end(), from_file.begin(), from_file.end());
  }
  if (items.empty()) {
    return estimate_propensity(data);
  }
  std::map<std::string, CellCode> by_label;
  for (CellCode code : data.cells()) {
    by_label[data.label(code)] = code;
  }
  std::map<CellCode, double> probs;
  for (const auto& item : items) {
    const auto eq = item.rfind('=');
    if (eq == std::string::npos) {
      throw InputError("propensity '" + item + "' must have the form cell=prob");
    }
    const std::string label = item.substr(0, eq);
    const double p = parse_double(item.substr(eq + 1), "propensity for cell '" + label + "'");
    if (label == "all") {
      for (CellCode code : data.cells()) {
        probs[code] = p;
      }
      continue;
    }
    const auto it = by_label.find(label);
    if (it == by_label.end()) {
      throw InputError("propensity given for unknown cell '" + label + "'");
    }
    probs[it->second] = p;
  }
  for (CellCode code : data.cells()) {
    if (!probs.count(code)) {
      throw InputError("no propensity supplied for cell '" + data.label(code) + "'");
    }
  }
  return known_propensity(probs);
}

json
data_summary(const Dataset& data, const PropensityModel& model, const DataOptions& opt)
{
  json cells = json::array();
  for (const auto& c : model.cells()) {
    json cell{ { "label", data.label(c.code) }, { "code", c.code }, { "propensity", c.probability } };
    if (model.kind() == PropensityKind::estimated) {
      cell["size"] = c.size;
      cell["observed"] = c.observed;
    }
    cells.push_back(cell);
  }
  json out{
    { "input", opt.input },
    { "n", data.size() },
    { "observed", data.observed_count() },
    { "observed_rate", data.observed_fraction() },
    { "propensity", model.kind() == PropensityKind::known ? "known" : "estimated" },
    { "cells", cells },
  };
  if (!std::isnan(opt.rescale_a)) {
    out["rescale"] = { { "a", opt.rescale_a }, { "b", opt.rescale_b } };
  }
  return out;
}

void
add_degree_grid_options(CLI::App& cmd, DegreeGrid& grid)
{
  cmd.add_option("--m-min", grid.m_min, "smallest candidate degree")->capture_default_str();
  cmd.add_option("--m-cap", grid.m_cap, "largest admissible degree")->capture_default_str();
  cmd.add_option("--m-growth", grid.growth, "m_max = min(growth n^(2/3), cap, n)")
    ->capture_default_str();
}

json
degree_grid_json(const DegreeGrid& grid)
{
  return { { "m_min", grid.m_min }, { "m_cap", grid.m_cap }, { "m_growth", grid.growth } };
}

void
write_trace(std::ostream& out, const LscvTrace& trace)
{
  out << "m,lscv,term1,term2\n";
  for (const auto& p : trace.points) {
    out << p.m << ',' << format_double(p.criterion) << ',' << format_double(p.term1) << ','
        << format_double(p.term2) << '\n';
  }
}

json
invocation(const std::vector<std::string>& args)
{
  return { { "program", "bernmar" }, { "version", version() }, { "args", args } };
}

struct EstimateCommand
{
  DataOptions data;
  DegreeGrid grid;
  int degree = 0;
  int grid_size = 512;
  int workers = 0;
  std::string trace_path;
  std::string output;
  std::string manifest;

  void run(const std::vector<std::string>& args, std::ostream& out) const
  {
    if (grid_size < 1) {
      throw InputError("--grid-size must be positive");
    }
    const auto dataset = load_data(data);
    const auto model = build_propensity(dataset, data);
    const auto ecdf = ipw_ecdf(dataset, model);
    std::optional<LscvTrace> trace;
    int m = degree;
    if (m <= 0) {
      trace = select_degree(ecdf, grid, workers);
      m = trace->selected;
    }
    const auto cdf = smooth(ecdf, m);
    {
      Sink sink(output, out);
      auto& s = sink.stream();
      s << "y,unsmoothed,smoothed\n";
      for (int g = 0; g < grid_size; ++g) {
        const double y = (g + 0.5) / grid_size;
        s << format_double(y) << ',' << format_double(ecdf(y)) << ',' << format_double(cdf(y))
          << '\n';
      }
    }
    if (!trace_path.empty()) {
      if (!trace) {
        throw InputError("--emit-trace needs LSCV selection (omit --degree)");
      }
      Sink sink(trace_path, out);
      write_trace(sink.stream(), *trace);
    }
    const auto path = manifest_path(manifest, output);
    if (!path.empty()) {
      json m_info{ { "degree", m }, { "selection", trace ? "lscv" : "fixed" } };
      if (trace) {
        m_info["grid"] = degree_grid_json(grid);
        m_info["lscv_at_selected"] = trace->selected_criterion;
      }
      json manifest_json{ { "command", "estimate" },
                          { "invocation", invocation(args) },
                          { "data", data_summary(dataset, model, data) },
                          { "smoothing", m_info },
                          { "grid_size", grid_size },
                          { "output", output } };
      write_manifest(path, manifest_json);
    }
  }
};

struct SelectDegreeCommand
{
  DataOptions data;
  DegreeGrid grid;
  int workers = 0;
  std::string output;
  std::string manifest;

  void run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) const
  {
    const auto dataset = load_data(data);
    const auto model = build_propensity(dataset, data);
    const auto ecdf = ipw_ecdf(dataset, model);
    const auto trace = select_degree(ecdf, grid, workers);
    {
      Sink sink(output, out);
      write_trace(sink.stream(), trace);
    }
    if (!output.empty() && output != "-") {
      out << "selected m = " << trace.selected << '\n';
    } else {
      err << "selected m = " << trace.selected << '\n';
    }
    const auto path = manifest_path(manifest, output);
    if (!path.empty()) {
      json manifest_json{ { "command", "select-degree" },
                          { "invocation", invocation(args) },
                          { "data", data_summary(dataset, model, data) },
                          { "grid", degree_grid_json(grid) },
                          { "selected", trace.selected },
                          { "lscv_at_selected", trace.selected_criterion },
                          { "output", output } };
      write_manifest(path, manifest_json);
    }
  }
};

struct TheoryCommand
{
  std::string model = "beta25-mar";
  int y_grid = 99;
  double n = 1000.0;
  std::string output;
  std::string manifest;

  void run(const std::vector<std::string>& args, std::ostream& out) const
  {
    if (y_grid < 1) {
      throw InputError("--y-grid must be at least 1");
    }
    if (!(n >= 1.0)) {
      throw InputError("--n must be at least 1");
    }
    TheoryContext ctx;
    try {
      ctx = theory_model(model);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    int undefined = 0;
    {
      Sink sink(output, out);
      auto& s = sink.stream();
      s << "y,B,sigma2,V,C,nu2,m_opt\n";
      // interior points only: the quantities live on (0, 1)
      for (int k = 1; k <= y_grid; ++k) {
        const double y = static_cast<double>(k) / (y_grid + 1);
        s << format_double(y) << ',' << format_double(bias_leading(ctx, y)) << ','
          << format_double(sigma2(ctx, y)) << ',' << format_double(variance_correction(ctx, y))
          << ',' << format_double(c_correction(ctx, y)) << ',' << format_double(nu2(ctx, y))
          << ',';
        try {
          s << format_double(m_opt_pointwise(ctx, y, n));
        } catch (const std::domain_error&) {
          s << "undefined";
          ++undefined;
        }
        s << '\n';
      }
    }
    const auto path = manifest_path(manifest, output);
    if (!path.empty()) {
      json global;
      try {
        global = m_opt_global(ctx, n);
      } catch (const std::domain_error& e) {
        global = "undefined";
      }
      json manifest_json{ { "command", "theory" },
                          { "invocation", invocation(args) },
                          { "model", model },
                          { "y_grid", y_grid },
                          { "n", n },
                          { "m_opt_global", global },
                          { "undefined_m_opt_points", undefined },
                          { "output", output } };
      write_manifest(path, manifest_json);
    }
  }
};

struct SimulateCommand
{
  std::vector<std::size_t> sizes;
  int reps = 100;
  std::uint64_t seed = 0;
  std::string roster = "all";
  std::string dgp = "beta25-mar";
  std::string kde_normalization = "total-weight";
  int grid_size = 512;
  int workers = 0;
  DegreeGrid degree_grid;
  BandwidthGrid bandwidth_grid;
  std::string output;
  std::string manifest;

  void run(const std::vector<std::string>& args, std::ostream& out) const
  {
    SimConfig config;
    if (!sizes.empty()) {
      config.sample_sizes = sizes;
    }
    config.reps = reps;
    config.base_seed = seed;
    config.roster = parse_roster(roster);
    if (dgp == "beta25-mar") {
      config.dgp = MarDgp{};
    } else if (dgp == "complete-data") {
      config.dgp = MarDgp::complete_data();
    } else {
      throw InputError("unknown --dgp '" + dgp + "' (expected beta25-mar or complete-data)");
    }
    if (kde_normalization == "total-weight") {
      config.kde_normalization = KdeNormalization::total_weight;
    } else if (kde_normalization == "sample-size") {
      config.kde_normalization = KdeNormalization::sample_size;
    } else {
      throw InputError("unknown --kde-normalization '" + kde_normalization + "'");
    }
    config.grid_size = grid_size;
    config.workers = workers;
    config.degree_grid = degree_grid;
    config.bandwidth_grid = bandwidth_grid;
    const auto result = run_study(config);

    {
      Sink sink(output, out);
      auto& s = sink.stream();
      s << "n,estimator,successes,failures,median_ise,iqr_ise,mean_ise,variance_ise,median_tuning\n";
      for (const auto& r : result.summaries) {
        s << r.n << ',' << to_string(r.estimator) << ',' << r.successes << ',' << r.failures << ','
          << format_double(r.median) << ',' << format_double(r.iqr) << ','
          << format_double(r.mean) << ',' << format_double(r.variance) << ','
          << format_double(r.median_tuning) << '\n';
      }
    }
    const auto path = manifest_path(manifest, output);
    if (!path.empty()) {
      json failures = json::array();
      for (const auto& r : result.summaries) {
        failures.push_back(
          { { "n", r.n }, { "estimator", to_string(r.estimator) }, { "failures", r.failures } });
      }
      json roster_json = json::array();
      for (auto id : config.roster) {
        roster_json.push_back(to_string(id));
      }
      json manifest_json{
        { "command", "simulate" },
        { "invocation", invocation(args) },
        { "base_seed", seed },
        { "stream_seed", "splitmix64(splitmix64(splitmix64(base) ^ n) ^ replication)" },
        { "generator", "xoshiro256**" },
        { "dgp",
          { { "name", dgp },
            { "alpha", config.dgp.alpha },
            { "beta", config.dgp.beta },
            { "cell_probs", config.dgp.cell_probs },
            { "propensities", config.dgp.propensities } } },
        { "sample_sizes", config.sample_sizes },
        { "reps", reps },
        { "grid_size", grid_size },
        { "roster", roster_json },
        { "degree_grid", degree_grid_json(degree_grid) },
        { "bandwidth_grid",
          { { "h_min", bandwidth_grid.h_min },
            { "h_max", bandwidth_grid.h_max },
            { "count", bandwidth_grid.count } } },
        { "kde_normalization", kde_normalization },
        { "failures", failures },
        { "wall_clock_seconds", result.wall_clock_seconds },
        { "output", output },
      };
      write_manifest(path, manifest_json);
    }
  }
};

std::string
trim_copy(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

//! Reads `key = value` lines; blank lines and lines starting with '#' or ';'
//! are skipped, and a value may be wrapped in double quotes.
std::vector<std::pair<std::string, std::string>>
read_config_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open configuration file '" + path + "'");
  }
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim_copy(line);
    if (text.empty() || text.front() == '#' || text.front() == ';') {
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw InputError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    auto key = trim_copy(text.substr(0, eq));
    auto value = trim_copy(text.substr(eq + 1));
    if (key.rfind("--", 0) == 0) {
      key = key.substr(2);
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) {
      throw InputError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    entries.emplace_back(key, value);
  }
  return entries;
}

//! Loads a subcommand's configuration file into its option defaults before
//! the command line is parsed, so explicit flags still override the file.
void
apply_config_file(CLI::App& app, const std::vector<std::string>& args)
{
  if (args.empty()) {
    return;
  }
  auto* sub = app.get_subcommand_no_throw(args.front());
  if (sub == nullptr) {
    return;
  }
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) {
    return;
  }
  for (const auto& [key, value] : read_config_file(path)) {
    auto* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw InputError("configuration file '" + path + "': unknown key '" + key + "' for " +
                       sub->get_name());
    }
    std::vector<std::string> parts{ value };
    if (opt->get_items_expected_max() > 1) {
      parts.clear();
      std::stringstream ss(value);
      std::string part;
      while (std::getline(ss, part, ',')) {
        parts.push_back(trim_copy(part));
      }
    }
    opt->add_result(parts);
    opt->run_callback();
    opt->clear();
    opt->required(false);
  }
}

void
add_output_options(CLI::App& cmd, std::string& output, std::string& manifest)
{
  cmd.add_option("--output,-o", output, "output CSV path (default: standard output)");
  cmd.add_option("--manifest", manifest, "JSON manifest path (default: <output>.manifest.json)");
}

} // namespace

int
run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "IPW Bernstein estimation of distribution functions under MAR responses",
                "bernmar" };
  app.require_subcommand(1);
  app.fallthrough(false);
  std::string config_path;

  EstimateCommand estimate;
  auto* est = app.add_subcommand("estimate", "estimate the response CDF from a CSV file");
  est->add_option("--config", config_path, "key=value file; flags given on the command line win");
  add_data_options(*est, estimate.data);
  add_degree_grid_options(*est, estimate.grid);
  est->add_option("--degree", estimate.degree, "fixed Bernstein degree (skips LSCV)")
    ->check(CLI::PositiveNumber);
  est->add_option("--grid-size", estimate.grid_size, "number of curve points")
    ->capture_default_str();
  est->add_option("--workers", estimate.workers, "worker threads (0: all cores)");
  est->add_option("--emit-trace", estimate.trace_path, "write the LSCV trace CSV here");
  add_output_options(*est, estimate.output, estimate.manifest);

  SelectDegreeCommand select;
  auto* sel = app.add_subcommand("select-degree", "LSCV trace and the selected degree");
  sel->add_option("--config", config_path, "key=value file; flags given on the command line win");
  add_data_options(*sel, select.data);
  add_degree_grid_options(*sel, select.grid);
  sel->add_option("--workers", select.workers, "worker threads (0: all cores)");
  add_output_options(*sel, select.output, select.manifest);

  TheoryCommand theory;
  auto* th = app.add_subcommand("theory", "asymptotic quantities for a built-in model");
  th->add_option("--config", config_path, "key=value file; flags given on the command line win");
  th->add_option("--model", theory.model, "beta25-mar or uniform")->capture_default_str();
  th->add_option("--y-grid", theory.y_grid, "number of interior points k/(K+1)")
    ->capture_default_str();
  th->add_option("--n", theory.n, "sample size for m_opt")->capture_default_str();
  add_output_options(*th, theory.output, theory.manifest);

  SimulateCommand simulate;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo ISE study");
  sim->add_option("--config", config_path, "key=value file; flags given on the command line win");
  sim->add_option("--n", simulate.sizes, "sample sizes (repeatable or comma-separated)")
    ->delimiter(',');
  sim->add_option("--reps", simulate.reps, "replications per sample size")->capture_default_str();
  sim->add_option("--seed", simulate.seed, "base seed")->required();
  sim->add_option("--roster", simulate.roster, "estimators, e.g. all, feasible-all, pseudo-kde")
    ->capture_default_str();
  sim->add_option("--dgp", simulate.dgp, "beta25-mar or complete-data")->capture_default_str();
  sim->add_option("--grid-size", simulate.grid_size, "ISE grid points")->capture_default_str();
  sim->add_option("--workers", simulate.workers, "worker threads (0: all cores)");
  sim->add_option("--kde-normalization", simulate.kde_normalization, "total-weight or sample-size")
    ->capture_default_str();
  add_degree_grid_options(*sim, simulate.degree_grid);
  sim->add_option("--kde-h-min", simulate.bandwidth_grid.h_min, "smallest bandwidth")
    ->capture_default_str();
  sim->add_option("--kde-h-max", simulate.bandwidth_grid.h_max, "largest bandwidth")
    ->capture_default_str();
  sim->add_option("--kde-h-count", simulate.bandwidth_grid.count, "number of bandwidths")
    ->capture_default_str();
  add_output_options(*sim, simulate.output, simulate.manifest);

  app.add_subcommand("version", "print the version");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    apply_config_file(app, args);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return 1;
  } catch (const CLI::Error& e) {
    err << "configuration error: " << e.what() << '\n';
    return 1;
  }
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*est) {
      estimate.run(args, out);
    } else if (*sel) {
      select.run(args, out, err);
    } else if (*th) {
      theory.run(args, out);
    } else if (*sim) {
      simulate.run(args, out);
    } else {
      out << "bernmar " << version() << '\n';
    }
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return 1;
  } catch (const EstimationError& e) {
    err << "estimation error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

} // namespace bernmar

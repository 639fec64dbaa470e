#include "bernmar/cli.hpp"
#include "bernmar/montecarlo.hpp"

#include <doctest.h>

#include <stdexcept>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace bernmar;
namespace fs = std::filesystem;

namespace {

struct Run
{
  int code;
  std::string out;
  std::string err;
};

Run
cli(std::vector<std::string> args)
{
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return { code, out.str(), err.str() };
}

fs::path
scratch_dir()
{
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("bernmar_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string
write_sample(const std::string& name, std::size_t n, std::uint64_t seed)
{
  const auto path = scratch_dir() / name;
  write_csv(path, generate(MarDgp{}, n, seed));
  return path.string();
}

std::string
slurp(const fs::path& p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>>
rows(const std::string& text)
{
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    out.push_back(split_csv_line(line));
  }
  return out;
}

} // namespace

TEST_CASE("version and help exit cleanly")
{
  const auto v = cli({ "version" });
  CHECK(v.code == 0);
  CHECK(v.out.find(version()) != std::string::npos);
  CHECK(cli({ "--help" }).code == 0);
  CHECK(cli({ "simulate", "--help" }).code == 0);
}

TEST_CASE("usage and input errors exit with 1")
{
  CHECK(cli({ "estimate" }).code == 1);
  CHECK(cli({ "bogus-command" }).code == 1);
  CHECK(cli({ "estimate", "--input", (scratch_dir() / "missing.csv").string() }).code == 1);
  CHECK(cli({ "simulate", "--seed", "1", "--roster", "nope", "--n", "10", "--reps", "1" }).code == 1);
  CHECK(cli({ "theory", "--model", "nope" }).code == 1);
  const auto input = write_sample("err.csv", 50, 1);
  CHECK(cli({ "estimate", "-i", input, "--rescale-a", "0" }).code == 1);
  CHECK(cli({ "estimate", "-i", input, "--propensity", "0=1.5,1=0.5" }).code == 1);
}

TEST_CASE("estimation failure exits with 2")
{
  const auto path = scratch_dir() / "unobserved_cell.csv";
  std::ofstream(path) << "y,x,delta\n0.2,0,1\n0.4,0,1\n,1,0\n,1,0\n";
  const auto r = cli({ "estimate", "-i", path.string() });
  CHECK(r.code == 2);
  CHECK(r.err.find("1") != std::string::npos);
}

TEST_CASE("estimate with a fixed degree")
{
  const auto input = write_sample("fixed.csv", 120, 2);
  const auto out = scratch_dir() / "fixed_out.csv";
  const auto r = cli({ "estimate", "-i", input, "--degree", "10", "--grid-size", "64", "-o", out.string() });
  REQUIRE(r.code == 0);
  const auto table = rows(slurp(out));
  REQUIRE(table.size() == 65);
  CHECK(table[0] == std::vector<std::string>{ "y", "unsmoothed", "smoothed" });
  double prev = -1.0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const double v = std::stod(table[i][2]);
    CHECK(v >= prev);
    prev = v;
  }
  const auto manifest = nlohmann::json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(manifest["smoothing"]["degree"] == 10);
  CHECK(manifest["smoothing"]["selection"] == "fixed");
  CHECK(manifest["data"]["n"] == 120);
}

TEST_CASE("known propensity of one in every cell equals plain smoothing")
{
  const auto path = scratch_dir() / "complete.csv";
  write_csv(path, generate(MarDgp::complete_data(), 80, 3));
  const auto known = cli({ "estimate", "-i", path.string(), "--degree", "12", "--propensity", "all=1.0" });
  const auto estimated = cli({ "estimate", "-i", path.string(), "--degree", "12" });
  REQUIRE(known.code == 0);
  REQUIRE(estimated.code == 0);
  CHECK(known.out == estimated.out);
}

TEST_CASE("select-degree writes the LSCV trace")
{
  const auto input = write_sample("sel.csv", 100, 4);
  const auto r = cli({ "select-degree", "-i", input });
  REQUIRE(r.code == 0);
  const auto table = rows(r.out);
  CHECK(table[0] == std::vector<std::string>{ "m", "lscv", "term1", "term2" });
  CHECK(table.size() == 1 + 64);
  CHECK(r.err.find("selected m = ") != std::string::npos);
  const auto capped = cli({ "select-degree", "-i", input, "--m-cap", "20", "--m-min", "5" });
  CHECK(rows(capped.out).size() == 1 + 16);
}

TEST_CASE("estimate trace agrees with select-degree")
{
  const auto input = write_sample("trace.csv", 90, 5);
  const auto trace = scratch_dir() / "trace_out.csv";
  REQUIRE(cli({ "estimate", "-i", input, "--emit-trace", trace.string() }).code == 0);
  CHECK(slurp(trace) == cli({ "select-degree", "-i", input }).out);
  CHECK(cli({ "estimate", "-i", input, "--degree", "4", "--emit-trace", trace.string() }).code == 1);
}

TEST_CASE("theory columns and the undefined marker")
{
  const auto r = cli({ "theory", "--y-grid", "3" });
  REQUIRE(r.code == 0);
  const auto table = rows(r.out);
  REQUIRE(table.size() == 4);
  CHECK(table[0] == std::vector<std::string>{ "y", "B", "sigma2", "V", "C", "nu2", "m_opt" });
  CHECK(std::stod(table[2][0]) == 0.5);
  CHECK(std::stod(table[2][1]) == doctest::Approx(-0.703125));
  CHECK(std::stod(table[2][6]) == doctest::Approx(307.18).epsilon(1e-4));
  const auto u = cli({ "theory", "--model", "uniform", "--y-grid", "3" });
  REQUIRE(u.code == 0);
  CHECK(rows(u.out)[1][6] == "undefined");
}

TEST_CASE("simulate is reproducible")
{
  const std::vector<std::string> args{ "simulate", "--n", "25", "--reps", "2", "--seed", "1", "--workers", "1" };
  const auto a = cli(args);
  const auto b = cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto table = rows(a.out);
  CHECK(table.size() == 7);
  CHECK(table[0][0] == "n");
  CHECK(table[1][1] == "pseudo-unsmoothed");
  auto w = args;
  w.back() = "3";
  CHECK(cli(w).out == a.out);
}

TEST_CASE("simulate manifest records the seed and failures")
{
  const auto out = scratch_dir() / "sim.csv";
  REQUIRE(cli({ "simulate", "--n", "20,30", "--reps", "2", "--seed", "77", "--roster", "feasible-all", "-o",
                out.string() })
            .code == 0);
  const auto manifest = nlohmann::json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(manifest["base_seed"] == 77);
  CHECK(manifest["failures"].size() == 6);
  CHECK(manifest["sample_sizes"] == nlohmann::json::array({ 20, 30 }));
  CHECK(manifest["kde_normalization"] == "total-weight");
}

TEST_CASE("configuration file supplies subcommand options")
{
  const auto input = write_sample("cfg.csv", 60, 6);
  const auto cfg = scratch_dir() / "estimate.toml";
  std::ofstream(cfg) << "input = \"" << input << "\"\ndegree = 7\ngrid-size = 16\n";
  const auto from_file = cli({ "estimate", "--config", cfg.string() });
  const auto direct = cli({ "estimate", "-i", input, "--degree", "7", "--grid-size", "16" });
  REQUIRE(from_file.code == 0);
  CHECK(from_file.out == direct.out);
  const auto overridden = cli({ "estimate", "--config", cfg.string(), "--degree", "9" });
  CHECK(overridden.out == cli({ "estimate", "-i", input, "--degree", "9", "--grid-size", "16" }).out);
  const auto bad = scratch_dir() / "bad.toml";
  std::ofstream(bad) << "# comment\nnot-an-option = 3\n";
  CHECK(cli({ "estimate", "-i", input, "--config", bad.string() }).code == 1);
  const auto sim_cfg = scratch_dir() / "sim.cfg";
  std::ofstream(sim_cfg) << "n = 20,30\nreps = 1\nseed = 5\nroster = pseudo-unsmoothed\n";
  const auto sim = cli({ "simulate", "--config", sim_cfg.string() });
  REQUIRE(sim.code == 0);
  CHECK(rows(sim.out).size() == 3);
}

TEST_CASE("survey fixture summary")
{
  const fs::path fixture = fs::path(BERNMAR_TEST_DATA_DIR) / "nhanes_fixture.csv";
  REQUIRE(fs::exists(fixture));
  const auto out = scratch_dir() / "nhanes_out.csv";
  const auto r = cli({ "estimate", "-i", fixture.string(), "--y-col", "LBXGLU", "--x-col", "RIDEXMON", "--x-col",
                       "RIAGENDR", "--rescale-a", "40", "--rescale-b", "460", "-o", out.string() });
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto manifest = nlohmann::json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(manifest["data"]["n"] == 3036);
  CHECK(manifest["data"]["cells"].size() == 4);
  CHECK(manifest["data"]["observed_rate"].get<double>() == doctest::Approx(0.952).epsilon(0.01));
  const int m = manifest["smoothing"]["degree"];
  CHECK(m >= 1);
  CHECK(m <= 300);
  const auto table = rows(slurp(out));
  REQUIRE(table.size() == 513);
  for (std::size_t i = 2; i < table.size(); ++i) {
    CHECK(std::stod(table[i][2]) >= std::stod(table[i - 1][2]));
  }
}

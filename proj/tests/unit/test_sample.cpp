#include "bernmar/error.hpp"
#include "bernmar/sample.hpp"

#include <doctest.h>

#include <stdexcept>

#include <random>
#include <set>
#include <sstream>

using namespace bernmar;

namespace {

Dataset
parse(const std::string& text, const ColumnMap& columns = {}, std::optional<RescaleSpec> spec = {})
{
  std::istringstream in(text);
  return read_csv(in, columns, spec);
}

std::string
serialize(const Dataset& data)
{
  std::ostringstream out;
  write_csv(out, data);
  return out.str();
}

} // namespace

TEST_CASE("three-row file parses")
{
  const auto d = parse("y,x,delta\n0.1,0,1\n0.5,1,1\n0.9,0,1\n");
  CHECK(d.size() == 3);
  CHECK(d.cells() == std::vector<CellCode>{ 0, 1 });
  CHECK(*d[0].y == 0.1);
  CHECK(d[1].x == 1);
  CHECK(d[2].x == 0);
  CHECK(d.observed_count() == 3);
}

TEST_CASE("missing response with delta = 0 is accepted")
{
  const auto d = parse("y,x,delta\n,0,0\n0.4,0,1\n");
  CHECK_FALSE(d[0].observed());
  CHECK(d[0].delta() == 0);
  CHECK(d.observed_fraction() == 0.5);
}

TEST_CASE("schema violations are rejected")
{
  CHECK_THROWS_AS(parse("y,x,delta\n0.3,0,0\n"), InputError);
  CHECK_THROWS_AS(parse("y,x,delta\n,0,1\n"), InputError);
  CHECK_THROWS_AS(parse("y,x,delta\n0.3,0,2\n"), InputError);
  CHECK_THROWS_AS(parse("y,x,delta\n1.3,0,1\n"), InputError);
  CHECK_THROWS_AS(parse("y,x,delta\nabc,0,1\n"), InputError);
  CHECK_THROWS_AS(parse("y,x,delta\n0.3,,1\n"), InputError);
  CHECK_THROWS_AS(parse("y,delta\n0.3,1\n"), InputError);
  CHECK_THROWS_AS(parse(""), InputError);
  CHECK_THROWS_AS(parse("y,x,delta\n"), InputError);
}

TEST_CASE("error messages name the row and column")
{
  try {
    parse("y,x,delta\n0.2,0,1\n0.3,0,0\n");
    FAIL("expected a schema violation");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    parse("resp,x,delta\n0.2,0,1\n");
    FAIL("expected a missing column");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("'y'") != std::string::npos);
  }
}

TEST_CASE("custom column names, quoting, CRLF and BOM")
{
  ColumnMap cols;
  cols.y = "glucose";
  cols.x = { "group" };
  cols.delta = "seen";
  const auto d = parse("\xEF\xBB\xBFid,seen,glucose,group\r\n1,1,0.25,\"a,b\"\r\n2,0,,c\r\n", cols);
  CHECK(d.size() == 2);
  CHECK(d.label(d[0].x) == "a,b");
  CHECK(d.label(d[1].x) == "c");
}

TEST_CASE("rescale examples and idempotence")
{
  const RescaleSpec spec(40.0, 460.0);
  CHECK(rescale(40.0, spec) == 0.0);
  CHECK(rescale(460.0, spec) == 1.0);
  CHECK(rescale(250.0, spec) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rescale(10.0, spec) == 0.0);
  CHECK(rescale(9000.0, spec) == 1.0);
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    CHECK(std::abs(rescale(spec.a + t * (spec.b - spec.a), spec) - t) < 1e-12);
  }
  double prev = -1.0;
  for (double v = 0.0; v < 600.0; v += 0.7) {
    const double r = rescale(v, spec);
    CHECK(r >= prev);
    prev = r;
  }
  CHECK_THROWS_AS(RescaleSpec(5.0, 5.0), InputError);
  CHECK_THROWS_AS(RescaleSpec(6.0, 5.0), InputError);
}

TEST_CASE("rescale is applied on ingestion and ties pass through")
{
  const auto d = parse("y,x,delta\n40,0,1\n250,0,1\n500,1,1\n470,1,1\n", {}, RescaleSpec(40.0, 460.0));
  CHECK(*d[0].y == 0.0);
  CHECK(*d[1].y == doctest::Approx(0.5));
  CHECK(*d[2].y == 1.0);
  CHECK(*d[3].y == 1.0);
}

TEST_CASE("cross_factor row-major examples")
{
  const std::vector<std::uint32_t> dims{ 2, 2 };
  CHECK(cross_factor(std::vector<std::uint32_t>{ 0, 0 }, dims) == 0);
  CHECK(cross_factor(std::vector<std::uint32_t>{ 1, 1 }, dims) == 3);
  CHECK(cross_factor(std::vector<std::uint32_t>{ 1, 0 }, dims) == 2);
  CHECK_THROWS_AS(cross_factor(std::vector<std::uint32_t>{ 2, 0 }, dims), InputError);
  CHECK_THROWS_AS(cross_factor(std::vector<std::uint32_t>{ 0 }, dims), InputError);
}

TEST_CASE("cross_factor is injective on grids up to 1e4 cells")
{
  const std::vector<std::vector<std::uint32_t>> grids{ { 10, 10, 10, 10 }, { 100, 100 }, { 7, 3, 11 } };
  for (const auto& dims : grids) {
    std::set<CellCode> seen;
    std::vector<std::uint32_t> t(dims.size(), 0);
    std::size_t total = 1;
    for (auto d : dims) {
      total *= d;
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rest = idx;
      for (std::size_t j = dims.size(); j-- > 0;) {
        t[j] = static_cast<std::uint32_t>(rest % dims[j]);
        rest /= dims[j];
      }
      const auto code = cross_factor(t, dims);
      CHECK(code < total);
      seen.insert(code);
    }
    CHECK(seen.size() == total);
  }
}

TEST_CASE("several covariate columns are crossed")
{
  ColumnMap cols;
  cols.x = { "a", "b" };
  const auto d = parse("y,a,b,delta\n0.1,1,2,1\n0.2,2,1,1\n,1,1,0\n", cols);
  // levels: a in {1,2}, b in {1,2}; codes densified in row-major order
  CHECK(d.cells().size() == 3);
  CHECK(d.label(d[2].x) == "1:1");
  CHECK(d.label(d[0].x) == "1:2");
  CHECK(d.label(d[1].x) == "2:1");
  CHECK(d[2].x < d[0].x);
  CHECK(d[0].x < d[1].x);
}

TEST_CASE("numeric labels order numerically")
{
  const auto d = parse("y,x,delta\n0.1,10,1\n0.2,9,1\n0.3,100,1\n");
  CHECK(d.label(0) == "9");
  CHECK(d.label(1) == "10");
  CHECK(d.label(2) == "100");
}

TEST_CASE("ingest serialize ingest round-trips byte-identically")
{
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::ostringstream src;
  src << "y,x,delta\n";
  for (int i = 0; i < 300; ++i) {
    const bool obs = u(gen) < 0.7;
    if (obs) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", u(gen));
      src << buf;
    }
    src << ',' << (i % 4) << ',' << (obs ? 1 : 0) << '\n';
  }
  const auto first = parse(src.str());
  const std::string once = serialize(first);
  CHECK(once == src.str());
  const auto second = parse(once);
  CHECK(serialize(second) == once);
}

TEST_CASE("dataset invariants")
{
  CHECK_THROWS_AS(Dataset({}), InputError);
  CHECK_THROWS_AS(Dataset({ Sample{ 1.5, 0 } }), InputError);
  const Dataset d({ Sample{ 0.5, 4 }, Sample{ std::nullopt, 2 } });
  CHECK(d.cells() == std::vector<CellCode>{ 2, 4 });
  CHECK(d.label(4) == "4");
}

#include "bernmar/bernstein.hpp"
#include "bernmar/ecdf.hpp"
#include "bernmar/error.hpp"
#include "bernmar/kde.hpp"
#include "bernmar/lscv.hpp"
#include "bernmar/montecarlo.hpp"
#include "bernmar/propensity.hpp"
#include "bernmar/sample.hpp"
#include "bernmar/theory.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

namespace py = pybind11;
using namespace bernmar;

namespace {

using array_d = py::array_t<double, py::array::c_style | py::array::forcecast>;

//! Builds a dataset from arrays; NaN in `y` marks a missing response.
Dataset
make_dataset(const array_d& y, const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& x)
{
  if (y.ndim() != 1 || x.ndim() != 1 || y.shape(0) != x.shape(0)) {
    throw InputError("y and x must be one-dimensional arrays of equal length");
  }
  std::vector<Sample> samples(static_cast<std::size_t>(y.shape(0)));
  auto yv = y.unchecked<1>();
  auto xv = x.unchecked<1>();
  for (py::ssize_t i = 0; i < y.shape(0); ++i) {
    if (xv(i) < 0) {
      throw InputError("covariate codes must be nonnegative");
    }
    samples[static_cast<std::size_t>(i)].x = static_cast<CellCode>(xv(i));
    if (!std::isnan(yv(i))) {
      samples[static_cast<std::size_t>(i)].y = yv(i);
    }
  }
  return Dataset(std::move(samples));
}

template<class F>
py::array_t<double>
vectorize(const F& f, const array_d& ys)
{
  py::array_t<double> out(ys.request().shape);
  auto in = ys.data();
  auto dst = out.mutable_data();
  for (py::ssize_t i = 0; i < ys.size(); ++i) {
    dst[i] = f(in[i]);
  }
  return out;
}

} // namespace

PYBIND11_MODULE(_bernmar, m)
{
  m.doc() = "IPW Bernstein estimation of distribution functions with responses missing at random";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<EstimationError>(m, "EstimationError", PyExc_RuntimeError);

  py::class_<Dataset>(m, "Dataset")
    .def(py::init(&make_dataset), py::arg("y"), py::arg("x"))
    .def("__len__", &Dataset::size)
    .def_property_readonly("cells", &Dataset::cells)
    .def_property_readonly("observed_count", &Dataset::observed_count)
    .def_property_readonly("observed_fraction", &Dataset::observed_fraction);

  m.def(
    "read_csv",
    [](const std::string& path, const std::string& y_col, const std::vector<std::string>& x_cols,
       const std::string& delta_col, std::optional<std::pair<double, double>> rescale) {
      ColumnMap cols{ y_col, x_cols, delta_col };
      std::optional<RescaleSpec> spec;
      if (rescale) {
        spec = RescaleSpec(rescale->first, rescale->second);
      }
      return ingest_csv(path, cols, spec);
    },
    py::arg("path"), py::arg("y_col") = "y", py::arg("x_cols") = std::vector<std::string>{ "x" },
    py::arg("delta_col") = "delta", py::arg("rescale") = py::none());

  py::class_<PropensityModel>(m, "PropensityModel")
    .def_property_readonly("known", [](const PropensityModel& p) { return p.kind() == PropensityKind::known; })
    .def("probability", &PropensityModel::probability, py::arg("cell"))
    .def_property_readonly("probabilities", [](const PropensityModel& p) {
      std::map<CellCode, double> out;
      for (const auto& c : p.cells()) {
        out[c.code] = c.probability;
      }
      return out;
    });
  m.def("estimate_propensity", &estimate_propensity, py::arg("data"));
  m.def("known_propensity", &known_propensity, py::arg("probabilities"));

  py::class_<WeightedEcdf>(m, "WeightedEcdf")
    .def("__call__", [](const WeightedEcdf& f, double y) { return f(y); })
    .def("__call__", [](const WeightedEcdf& f, const array_d& ys) { return vectorize(f, ys); })
    .def_property_readonly("n", &WeightedEcdf::n)
    .def_property_readonly("total_mass", &WeightedEcdf::total_mass)
    .def_property_readonly("values",
                           [](const WeightedEcdf& f) { return std::vector<double>(f.values().begin(), f.values().end()); })
    .def_property_readonly("weights", [](const WeightedEcdf& f) {
      return std::vector<double>(f.weights().begin(), f.weights().end());
    });
  m.def("ipw_ecdf", &ipw_ecdf, py::arg("data"), py::arg("propensity"));

  py::class_<BernsteinCdf>(m, "BernsteinCdf")
    .def(py::init<std::vector<double>>(), py::arg("coeffs"))
    .def("__call__", [](const BernsteinCdf& f, double y) { return f(y); })
    .def("__call__", [](const BernsteinCdf& f, const array_d& ys) { return vectorize(f, ys); })
    .def_property_readonly("degree", &BernsteinCdf::degree)
    .def_property_readonly("coeffs", &BernsteinCdf::coeffs);
  m.def("smooth", &smooth, py::arg("ecdf"), py::arg("m"));
  m.def("bernstein_basis", &bernstein_basis, py::arg("m"), py::arg("k"), py::arg("y"));

  py::class_<DegreeGrid>(m, "DegreeGrid")
    .def(py::init([](int m_min, int m_cap, double growth) { return DegreeGrid{ m_min, m_cap, growth }; }),
         py::arg("m_min") = 1, py::arg("m_cap") = 300, py::arg("growth") = 3.0)
    .def_readwrite("m_min", &DegreeGrid::m_min)
    .def_readwrite("m_cap", &DegreeGrid::m_cap)
    .def_readwrite("growth", &DegreeGrid::growth)
    .def("m_max", &DegreeGrid::m_max, py::arg("n"));

  py::class_<LscvTrace>(m, "LscvTrace")
    .def_readonly("selected", &LscvTrace::selected)
    .def_readonly("selected_criterion", &LscvTrace::selected_criterion)
    .def_property_readonly("degrees", [](const LscvTrace& t) {
      std::vector<int> out;
      for (const auto& p : t.points) {
        out.push_back(p.m);
      }
      return out;
    })
    .def_property_readonly("criterion", [](const LscvTrace& t) {
      std::vector<double> out;
      for (const auto& p : t.points) {
        out.push_back(p.criterion);
      }
      return out;
    });
  m.def("select_degree", &select_degree, py::arg("ecdf"), py::arg("grid") = DegreeGrid{}, py::arg("workers") = 1);

  py::enum_<KdeNormalization>(m, "KdeNormalization")
    .value("sample_size", KdeNormalization::sample_size)
    .value("total_weight", KdeNormalization::total_weight);

  py::class_<IntegratedKde>(m, "IntegratedKde")
    .def(py::init<const WeightedEcdf&, double, KdeNormalization>(), py::arg("ecdf"), py::arg("h"),
         py::arg("normalization") = KdeNormalization::sample_size)
    .def("__call__", [](const IntegratedKde& f, double y) { return f(y); })
    .def("__call__", [](const IntegratedKde& f, const array_d& ys) { return vectorize(f, ys); })
    .def_property_readonly("bandwidth", &IntegratedKde::bandwidth);

  py::class_<BandwidthTrace>(m, "BandwidthTrace")
    .def_readonly("selected", &BandwidthTrace::selected)
    .def_readonly("selected_criterion", &BandwidthTrace::selected_criterion);
  m.def(
    "select_bandwidth",
    [](const WeightedEcdf& f, double h_min, double h_max, int count, KdeNormalization norm, int workers) {
      return select_bandwidth(f, BandwidthGrid{ h_min, h_max, count }, norm, workers);
    },
    py::arg("ecdf"), py::arg("h_min") = 1e-3, py::arg("h_max") = 1.0, py::arg("count") = 40,
    py::arg("normalization") = KdeNormalization::sample_size, py::arg("workers") = 1);

  py::class_<TheoryContext>(m, "TheoryContext");
  m.def("theory_model", &theory_model, py::arg("name") = "beta25-mar");
  m.def("bias_leading", &bias_leading, py::arg("model"), py::arg("y"));
  m.def("sigma2", &sigma2, py::arg("model"), py::arg("y"));
  m.def("variance_correction", &variance_correction, py::arg("model"), py::arg("y"));
  m.def("c_correction", &c_correction, py::arg("model"), py::arg("y"));
  m.def("nu2", &nu2, py::arg("model"), py::arg("y"));
  m.def("m_opt_pointwise", &m_opt_pointwise, py::arg("model"), py::arg("y"), py::arg("n"));
  m.def("m_opt_global", &m_opt_global, py::arg("model"), py::arg("n"));

  m.def(
    "generate",
    [](std::size_t n, std::uint64_t seed, bool complete) {
      return generate(complete ? MarDgp::complete_data() : MarDgp{}, n, seed);
    },
    py::arg("n"), py::arg("seed"), py::arg("complete") = false);

  m.def(
    "simulate",
    [](const std::vector<std::size_t>& sizes, int reps, std::uint64_t seed, const std::string& roster, int workers) {
      SimConfig cfg;
      cfg.sample_sizes = sizes;
      cfg.reps = reps;
      cfg.base_seed = seed;
      cfg.roster = parse_roster(roster);
      cfg.workers = workers;
      const auto res = run_study(cfg);
      py::list out;
      for (const auto& s : res.summaries) {
        py::dict row;
        row["n"] = s.n;
        row["estimator"] = to_string(s.estimator);
        row["successes"] = s.successes;
        row["failures"] = s.failures;
        row["median_ise"] = s.median;
        row["iqr_ise"] = s.iqr;
        row["mean_ise"] = s.mean;
        row["variance_ise"] = s.variance;
        row["median_tuning"] = s.median_tuning;
        out.append(row);
      }
      return out;
    },
    py::arg("sizes"), py::arg("reps"), py::arg("seed"), py::arg("roster") = "all", py::arg("workers") = 1);
}

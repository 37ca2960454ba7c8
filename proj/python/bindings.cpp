#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "betashap/error.hpp"
#include "betashap/exact.hpp"
#include "betashap/mc.hpp"
#include "betashap/synthetic.hpp"
#include "betashap/tasks.hpp"

namespace py = pybind11;
using namespace betashap;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Vector = py::array_t<double, py::array::c_style | py::array::forcecast>;

Dataset to_dataset(const Matrix& x, const Vector& y) {
  if (x.ndim() != 2) throw py::value_error("X must be two-dimensional");
  if (y.ndim() != 1 || y.shape(0) != x.shape(0)) throw py::value_error("y must have one entry per row of X");
  const auto n = static_cast<std::size_t>(x.shape(0));
  const auto d = static_cast<std::size_t>(x.shape(1));
  std::vector<double> features(x.data(), x.data() + n * d);
  std::vector<double> labels(y.data(), y.data() + n);
  bool binary = true;
  for (double v : labels) binary = binary && (v == 0.0 || v == 1.0);
  return Dataset::with_row_ids(d, std::move(features), std::move(labels),
                               binary ? LabelKind::binary : LabelKind::real);
}

py::tuple from_dataset(const Dataset& data) {
  Matrix x({data.size(), data.dim()});
  std::copy(data.features().begin(), data.features().end(), x.mutable_data());
  Vector y(data.size());
  std::copy(data.labels().begin(), data.labels().end(), y.mutable_data());
  return py::make_tuple(x, y);
}

SyntheticKind kind_of(const std::string& name) {
  const auto kind = parse_synthetic_kind(name);
  if (!kind) throw py::value_error("unknown dataset kind '" + name + "'");
  return *kind;
}

WeightScheme scheme_of(std::size_t n, const std::string& scheme, double alpha, double beta) {
  if (scheme == "beta") return make_beta_scheme(n, alpha, beta);
  if (scheme == "data-shapley") return make_scheme(n, SchemeOrigin::data_shapley);
  if (scheme == "loo-first") return make_scheme(n, SchemeOrigin::loo_first);
  if (scheme == "loo-last") return make_scheme(n, SchemeOrigin::loo_last);
  throw py::value_error("scheme must be beta, data-shapley, loo-first or loo-last");
}

UtilitySpec spec_for(const Dataset& train, Dataset validation, double l2) {
  UtilitySpec spec;
  if (train.label_kind() == LabelKind::binary) {
    spec.model = ModelKind::logistic_regression;
    spec.metric = Metric::accuracy;
  } else {
    spec.model = ModelKind::linear_regression;
    spec.metric = Metric::negative_mse;
  }
  spec.validation = std::move(validation);
  spec.training.l2 = l2;
  return spec;
}

py::array_t<double> as_array(const std::vector<double>& v) {
  py::array_t<double> out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_betashap, m) {
  m.doc() = "Beta Shapley data valuation";

  py::register_exception<Error>(m, "BetaShapError", PyExc_ValueError);

  m.def(
      "weights",
      [](std::size_t n, const std::string& scheme, double alpha, double beta) {
        const auto s = scheme_of(n, scheme, alpha, beta);
        return py::make_tuple(as_array({s.raw().begin(), s.raw().end()}),
                              as_array({s.normalized().begin(), s.normalized().end()}));
      },
      py::arg("n"), py::arg("scheme") = "beta", py::arg("alpha") = 1.0, py::arg("beta") = 1.0,
      "Raw and normalized weights w(j), w~(j) for j = 1..n.");

  m.def(
      "generate",
      [](const std::string& kind, std::size_t n, std::uint64_t seed) { return from_dataset(generate(kind_of(kind), n, seed)); },
      py::arg("kind"), py::arg("n"), py::arg("seed") = 0, "Synthetic (X, y).");

  m.def(
      "flip_labels",
      [](const Matrix& x, const Vector& y, double fraction, std::uint64_t seed) {
        auto [flipped, record] = flip_labels(to_dataset(x, y), fraction, seed);
        return py::make_tuple(from_dataset(flipped)[1], record.flipped_ids);
      },
      py::arg("X"), py::arg("y"), py::arg("fraction"), py::arg("seed") = 0,
      "Flipped labels and the sorted flipped row indices.");

  m.def(
      "semivalue_table",
      [](const std::vector<double>& table, const std::string& scheme, double alpha, double beta) {
        TableGame game(table);
        return as_array(semivalue_exact(game, scheme_of(game.size(), scheme, alpha, beta)).values);
      },
      py::arg("table"), py::arg("scheme") = "beta", py::arg("alpha") = 1.0, py::arg("beta") = 1.0,
      "Exact semivalues of a game given as a utility table indexed by bitmask.");

  m.def(
      "value_exact",
      [](const Matrix& x, const Vector& y, const Matrix& xv, const Vector& yv, const std::string& scheme,
         double alpha, double beta, double l2, std::size_t threads) {
        const auto train = to_dataset(x, y);
        const auto spec = spec_for(train, to_dataset(xv, yv), l2);
        py::gil_scoped_release release;
        return semivalue_exact(train, spec, scheme_of(train.size(), scheme, alpha, beta), threads).values;
      },
      py::arg("X"), py::arg("y"), py::arg("X_val"), py::arg("y_val"), py::arg("scheme") = "beta",
      py::arg("alpha") = 16.0, py::arg("beta") = 1.0, py::arg("l2") = 1.0, py::arg("threads") = 1,
      "Exact data values by subset enumeration (n <= 20).");

  m.def(
      "value_mc",
      [](const Matrix& x, const Vector& y, const Matrix& xv, const Vector& yv, const std::string& scheme,
         double alpha, double beta, std::size_t chains, double rho, std::size_t min_iterations,
         std::size_t max_iterations, std::uint64_t seed, double l2, std::size_t threads) {
        const auto train = to_dataset(x, y);
        const auto spec = spec_for(train, to_dataset(xv, yv), l2);
        McConfig config;
        config.chains = chains;
        config.rho = rho;
        config.min_iterations = min_iterations;
        config.max_iterations = max_iterations;
        config.seed = seed;
        config.threads = threads;
        ValueReport report;
        {
          py::gil_scoped_release release;
          report = mc_estimate(train, spec, scheme_of(train.size(), scheme, alpha, beta), config);
        }
        py::dict out;
        out["values"] = as_array(report.values.values);
        out["standard_error"] = as_array(report.standard_error);
        out["rhat"] = as_array(report.rhat);
        out["iterations_per_chain"] = report.iterations_per_chain;
        out["utility_queries"] = report.utility_queries;
        out["converged"] = report.terminated_by == Termination::converged;
        return out;
      },
      py::arg("X"), py::arg("y"), py::arg("X_val"), py::arg("y_val"), py::arg("scheme") = "beta",
      py::arg("alpha") = 16.0, py::arg("beta") = 1.0, py::arg("chains") = 10, py::arg("rho") = 1.0005,
      py::arg("min_iterations") = 100, py::arg("max_iterations") = 50000, py::arg("seed") = 0,
      py::arg("l2") = 1.0, py::arg("threads") = 1, "Monte-Carlo data values with Gelman-Rubin stopping.");

  m.def(
      "detect_noisy",
      [](const std::vector<double>& values, const std::vector<PointId>& flipped) {
        ValueVector v;
        v.values = values;
        v.ids = default_ids(values.size());
        NoiseRecord record;
        record.flipped_ids = flipped;
        const auto r = detect_noisy(v, record);
        py::dict out;
        out["selected"] = r.selected;
        out["threshold"] = r.threshold;
        out["precision"] = r.score.precision;
        out["recall"] = r.score.recall;
        out["f1"] = r.score.f1;
        return out;
      },
      py::arg("values"), py::arg("flipped"), "Two-means detection of low-valued points.");

  m.def(
      "snr_scan",
      [](const std::string& kind, std::size_t n, std::vector<std::size_t> grid, std::size_t repeats,
         std::size_t samples, bool flip_target, std::uint64_t seed, std::size_t threads) {
        SnrOptions o;
        o.kind = kind_of(kind);
        o.n = n;
        o.grid = std::move(grid);
        o.repeats = repeats;
        o.samples = samples;
        o.flip_target = flip_target;
        o.seed = seed;
        o.threads = threads;
        SnrProfile p;
        {
          py::gil_scoped_release release;
          p = snr_scan(o);
        }
        py::list rows;
        for (const auto& row : p.rows) {
          py::dict r;
          r["j"] = row.j;
          r["mean"] = row.mean;
          r["std"] = row.std;
          r["snr"] = row.snr ? py::object(py::float_(*row.snr)) : py::object(py::none());
          r["zeta"] = row.zeta;
          rows.append(r);
        }
        return rows;
      },
      py::arg("kind") = "snr-classification", py::arg("n") = 500,
      py::arg("grid") = std::vector<std::size_t>{2, 50, 150, 400}, py::arg("repeats") = 50,
      py::arg("samples") = 50, py::arg("flip_target") = false, py::arg("seed") = 0, py::arg("threads") = 1,
      "Signal-to-noise of marginal contributions across cardinalities.");
}

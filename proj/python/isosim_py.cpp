#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isosim/cli.hpp"
#include "isosim/cluster.hpp"
#include "isosim/eval.hpp"
#include "isosim/simulate.hpp"

namespace py = pybind11;
using namespace isosim;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Dataset to_dataset(const Array& points) {
  if (points.ndim() != 2) throw PreconditionError("points must be a 2-D array");
  Dataset d;
  d.points = Matrix(points.shape(0), points.shape(1));
  std::copy(points.data(), points.data() + points.size(), d.points.values().begin());
  return d;
}

Array to_array(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

DissimilarityMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw PreconditionError("matrix must be square");
  DissimilarityMatrix m;
  m.values = to_dataset(a).points;
  return m;
}

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

py::list rows(const SimulationResult& r) {
  py::list out;
  for (const auto& row : r.rows)
    out.append(py::make_tuple(row.parameter, row.p_sparse, row.p_dense, row.se_sparse, row.se_dense));
  return out;
}

SimulationConfig config(std::size_t trials, std::uint64_t seed) {
  auto cfg = default_simulation_config(seed);
  cfg.trials = trials;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_isosim, m) {
  m.attr("__version__") = kVersion;
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_IOError);

  m.def(
      "load_csv",
      [](const std::string& path, std::optional<std::string> label) {
        const auto d = load_csv(path, label);
        return py::make_tuple(to_array(d.points), d.labels ? py::cast(*d.labels) : py::none());
      },
      py::arg("path"), py::arg("label") = py::none(), "Returns (points, labels or None).");

  m.def(
      "min_max_normalize", [](const Array& points) { return to_array(min_max_normalize(to_dataset(points)).first.points); },
      py::arg("points"));

  m.def(
      "dissimilarity_matrix",
      [](const Array& points, const std::string& kind, std::size_t psi, std::size_t t, std::uint64_t seed) {
        const auto d = to_dataset(points);
        Matrix values;
        {
          py::gil_scoped_release release;
          values = dissimilarity_matrix(d, build_ensemble(d, parse_partition_kind(kind), psi, t, seed)).values;
        }
        return to_array(values);
      },
      py::arg("points"), py::arg("kind") = "anne", py::arg("psi") = 16, py::arg("t") = 200, py::arg("seed") = 0,
      "Isolation dissimilarity: 1 - shared-cell fraction over t partitionings.");

  m.def(
      "euclidean_matrix", [](const Array& points) { return to_array(euclidean_matrix(to_dataset(points)).values); },
      py::arg("points"));

  m.def(
      "exact_similarity",
      [](const Array& points, std::size_t psi, const Array& x, const Array& y) {
        return exact_similarity(to_dataset(points), PartitionKind::aNNE, psi, to_vector(x), to_vector(y));
      },
      py::arg("points"), py::arg("psi"), py::arg("x"), py::arg("y"));

  m.def(
      "dbscan",
      [](const Array& matrix, double cutoff, std::size_t min_points) {
        return dbscan(to_matrix(matrix), cutoff, min_points).assignment;
      },
      py::arg("matrix"), py::arg("cutoff"), py::arg("min_points"), "Labels per point, -1 for noise.");

  m.def(
      "density_peaks",
      [](const Array& matrix, std::size_t k, double d_c) { return density_peaks(to_matrix(matrix), k, d_c).assignment; },
      py::arg("matrix"), py::arg("k"), py::arg("d_c"));

  m.def(
      "f1_score",
      [](const std::vector<int>& predicted, const std::vector<int>& truth) { return f1_score(predicted, truth).macro_f1; },
      py::arg("predicted"), py::arg("truth"), "Macro F1 under the optimal one-to-one cluster/class matching.");

  m.def(
      "detectability",
      [](const Array& matrix, const std::vector<std::size_t>& modes, const std::vector<double>& cutoffs) {
        py::list out;
        for (const auto& r : detectability_diagnostic(to_matrix(matrix), modes, cutoffs))
          out.append(py::dict(py::arg("cutoff") = r.cutoff, py::arg("mode_mass") = r.mode_mass,
                              py::arg("valley") = r.valley, py::arg("condition") = r.condition));
        return out;
      },
      py::arg("matrix"), py::arg("modes"), py::arg("cutoffs"));

  m.def(
      "simulate_vs_psi", [](std::size_t trials, std::uint64_t seed) { return rows(simulate_vs_psi(config(trials, seed))); },
      py::arg("trials") = 10000, py::arg("seed") = 0, "Rows of (psi, p_sparse, p_dense, se_sparse, se_dense).");
  m.def(
      "simulate_vs_distance",
      [](std::size_t trials, std::uint64_t seed) { return rows(simulate_vs_distance(config(trials, seed))); },
      py::arg("trials") = 10000, py::arg("seed") = 0);

  m.def(
      "cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "isosim");
        std::ostringstream out, err;
        const int status = cli::run(args, out, err);
        return py::make_tuple(status, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (status, stdout, stderr).");
}

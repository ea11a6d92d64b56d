#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mheal/clustering.hpp"
#include "mheal/common.hpp"
#include "mheal/energy.hpp"
#include "mheal/evaluation.hpp"
#include "mheal/geometry.hpp"
#include "mheal/pipeline.hpp"
#include "mheal/selection.hpp"
#include "mheal/versionspace.hpp"

namespace py = pybind11;
using namespace mheal;

namespace {

// Rows arriving from numpy are unit-norm only up to float round-off.
constexpr double kUnitTol = 1e-9;

UnitPointSet as_unit(const Matrix& rows) { return UnitPointSet::from_unit_rows(rows, kUnitTol); }

geometry::NormalizeMode normalize_mode(const std::string& name) {
  if (name == "l2") return geometry::NormalizeMode::L2;
  if (name == "standardize") return geometry::NormalizeMode::StandardizeThenL2;
  throw Error(ErrorCode::InvalidArgument, "normalize must be l2 or standardize");
}

py::list warnings_list(const Warnings& warnings) {
  py::list out;
  for (const auto& w : warnings) out.append(py::make_tuple(w.code, w.message));
  return out;
}

py::dict energy_dict(const energy::EnergyValue& e) {
  py::dict d;
  d["s"] = e.s;
  d["value"] = e.value;
  d["pair_count"] = e.pair_count;
  d["min_pair_distance"] = e.min_pair_distance;
  d["duplicate"] = e.duplicate ? py::object(py::make_tuple(e.duplicate->first, e.duplicate->second))
                               : py::object(py::none());
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hyperspherical-energy coreset selection";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&]() -> py::object {
    return py::exception<Error>(m, "MhealError", PyExc_ValueError);
  });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& type = error_type.get_stored();
      py::object exc = type(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(type.ptr(), exc.ptr());
    }
  });

  m.def(
      "normalize",
      [](const Matrix& points, const std::string& mode) {
        return geometry::normalize_to_sphere(points, normalize_mode(mode)).points.rows();
      },
      py::arg("points"), py::arg("mode") = "standardize");

  m.def(
      "energy",
      [](const Matrix& points, int s, std::optional<std::vector<Index>> subset) {
        const auto pool = as_unit(points);
        return energy_dict(subset ? energy::energy(pool, *subset, s) : energy::energy(pool, s));
      },
      py::arg("points"), py::arg("s") = 0, py::arg("subset") = py::none());

  m.def(
      "run_algorithm1",
      [](const Matrix& points, Index budget) {
        const auto r = selection::run_algorithm1(as_unit(points), budget);
        py::dict d;
        d["selected"] = r.selected;
        d["best_start"] = r.best_start;
        d["log_product"] = r.energy.log_product();
        d["start_log_products"] = r.start_log_products;
        d["warnings"] = warnings_list(r.warnings);
        return d;
      },
      py::arg("points"), py::arg("budget"));

  m.def(
      "maxmin_select",
      [](const Matrix& points, Index budget, Index init) {
        const auto r = selection::maxmin_select(as_unit(points), budget, init);
        py::dict d;
        d["selected"] = r.selected;
        d["radii"] = r.radii;
        return d;
      },
      py::arg("points"), py::arg("budget"), py::arg("init") = 0);

  m.def(
      "select_subset",
      [](const std::string& method, const Matrix& points, Index budget, std::uint64_t seed) {
        return evaluation::select_subset(evaluation::parse_selection_method(method), as_unit(points),
                                         budget, seed);
      },
      py::arg("method"), py::arg("points"), py::arg("budget"), py::arg("seed") = 0);

  m.def(
      "spherical_kmeans",
      [](const Matrix& points, Index k, Index max_iters, std::uint64_t seed) {
        const auto r = clustering::spherical_kmeans(as_unit(points), k, max_iters, seed);
        py::dict d;
        d["centers"] = r.centers;
        d["assignments"] = r.assignments;
        d["objective"] = r.objective;
        d["objective_trace"] = r.objective_trace;
        d["iterations"] = r.iterations_run;
        d["converged"] = r.converged;
        return d;
      },
      py::arg("points"), py::arg("k"), py::arg("max_iters") = clustering::kDefaultMaxIters,
      py::arg("seed") = 0);

  m.def(
      "run_mheal",
      [](const Matrix& points, Index k, Index tau, Index m_candidates, std::uint64_t seed,
         const std::string& normalize, Index max_iters) {
        pipeline::MhealConfig config;
        config.k = k;
        config.tau = tau;
        config.m = m_candidates;
        config.seed = seed;
        config.normalize_mode = normalize_mode(normalize);
        config.max_iters = max_iters;
        const auto r = pipeline::run_mheal(points, config);
        py::dict d;
        d["indices"] = r.reps.flat;
        d["per_cluster"] = r.reps.per_cluster;
        d["starts"] = r.reps.starts;
        d["radii"] = r.reps.radii;
        d["assignments"] = r.model.assignments;
        d["centers"] = r.model.centers;
        d["warnings"] = warnings_list(r.warnings);
        return d;
      },
      py::arg("points"), py::arg("k"), py::arg("tau"), py::arg("m") = 0, py::arg("seed") = 0,
      py::arg("normalize") = "standardize", py::arg("max_iters") = clustering::kDefaultMaxIters);

  m.def(
      "match_losses",
      [](const Matrix& full, const Matrix& subset, double beta, Index bins) {
        const auto r = evaluation::match_losses(full, subset, beta, bins);
        py::dict d;
        d["kl"] = r.kl;
        d["mmd"] = r.mmd;
        d["mmd_mu"] = r.mmd_mu;
        d["beta"] = r.beta;
        d["n"] = r.n;
        d["m"] = r.m;
        d["bins"] = r.bins;
        return d;
      },
      py::arg("full"), py::arg("subset"), py::arg("beta") = 0.552,
      py::arg("bins") = evaluation::kDefaultBins);

  m.def(
      "boundary_partition",
      [](const Matrix& points, Index knn_k, double fraction, const std::string& direction) {
        if (direction != "high" && direction != "low") {
          throw Error(ErrorCode::InvalidArgument, "direction must be high or low");
        }
        const auto r = evaluation::boundary_partition(
            points, knn_k, fraction,
            direction == "high" ? evaluation::EnergyDirection::HighEnergy
                                : evaluation::EnergyDirection::LowEnergy);
        py::dict d;
        d["in_version_space"] = r.in_version_space;
        d["out_version_space"] = r.out_version_space;
        d["scores"] = r.scores;
        d["warnings"] = warnings_list(r.warnings);
        return d;
      },
      py::arg("points"), py::arg("knn_k") = evaluation::kDefaultKnn,
      py::arg("fraction") = evaluation::kDefaultBoundaryFraction, py::arg("direction") = "high");

  m.def(
      "theta",
      [](double xi, double r, Index k) { return versionspace::theta_from_params(xi, r, k).theta; },
      py::arg("xi"), py::arg("r"), py::arg("k"));
}

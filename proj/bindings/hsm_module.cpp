#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hsm/covband.hpp"
#include "hsm/harness.hpp"
#include "hsm/hierarchy.hpp"
#include "hsm/prox_gl.hpp"
#include "hsm/prox_log.hpp"
#include "hsm/solvers.hpp"

namespace py = pybind11;

namespace {

hsm::BandPenalty penalty_from_name(const std::string& name) {
  if (name == "log") return hsm::BandPenalty::Log;
  if (name == "gl") return hsm::BandPenalty::Gl;
  if (name == "mgl") return hsm::BandPenalty::Mgl;
  throw std::invalid_argument("unknown estimator: " + name);
}

Eigen::VectorXd group_weights(const hsm::GroupStructure& gs) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(gs.groups.size()));
  for (size_t i = 0; i < gs.groups.size(); ++i)
    w[static_cast<Eigen::Index>(i)] = gs.groups[i].weight;
  return w;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Proximal operators and banded covariance estimators for "
            "hierarchically structured sparsity";
  m.attr("__version__") = hsm::kVersion;

  py::class_<hsm::Hierarchy>(m, "Hierarchy",
                             "DAG over disjoint coordinate index sets")
      .def(py::init<int, std::vector<std::vector<int>>,
                    std::vector<std::pair<int, int>>>(),
           py::arg("p"), py::arg("nodes"), py::arg("edges"))
      .def_static("path", &hsm::Hierarchy::path, py::arg("node_sizes"))
      .def_property_readonly("p", &hsm::Hierarchy::p)
      .def_property_readonly("node_count", &hsm::Hierarchy::node_count)
      .def_property_readonly(
          "valid", [](const hsm::Hierarchy& h) { return h.validate().ok(); })
      .def_property_readonly(
          "validation_message",
          [](const hsm::Hierarchy& h) { return h.validate().message; })
      .def("nodes", &hsm::Hierarchy::nodes)
      .def("edges", &hsm::Hierarchy::edges)
      .def("children", &hsm::Hierarchy::children)
      .def("parents", &hsm::Hierarchy::parents)
      .def("descendants", &hsm::Hierarchy::descendants, py::arg("i"))
      .def("ancestors", &hsm::Hierarchy::ancestors, py::arg("j"))
      .def("is_forest", &hsm::Hierarchy::is_forest)
      .def("is_path", &hsm::Hierarchy::is_path);

  py::class_<hsm::LogProxSolution>(m, "LogProxSolution")
      .def_readonly("beta", &hsm::LogProxSolution::beta)
      .def_readonly("knots", &hsm::LogProxSolution::knots)
      .def_readonly("cycles", &hsm::LogProxSolution::cycles)
      .def_readonly("loop_evals", &hsm::LogProxSolution::loop_evals)
      .def_readonly("converged", &hsm::LogProxSolution::converged);

  py::class_<hsm::GlProxSolution>(m, "GlProxSolution")
      .def_readonly("beta", &hsm::GlProxSolution::beta)
      .def_readonly("dual_norms", &hsm::GlProxSolution::dual_norms)
      .def_readonly("cycles", &hsm::GlProxSolution::cycles)
      .def_readonly("converged", &hsm::GlProxSolution::converged);

  py::class_<hsm::MglProxSolution>(m, "MglProxSolution")
      .def_readonly("beta", &hsm::MglProxSolution::beta)
      .def_readonly("v_hat", &hsm::MglProxSolution::v_hat)
      .def_readonly("converged", &hsm::MglProxSolution::converged);

  py::class_<hsm::BandEstimate>(m, "BandEstimate")
      .def_readonly("sigma", &hsm::BandEstimate::sigma)
      .def_readonly("bandwidth", &hsm::BandEstimate::bandwidth)
      .def_readonly("knots", &hsm::BandEstimate::knots);

  py::class_<hsm::AdmmResult>(m, "RegressionResult")
      .def_readonly("beta", &hsm::AdmmResult::beta)
      .def_readonly("objective", &hsm::AdmmResult::objective)
      .def_readonly("primal_residual", &hsm::AdmmResult::primal_residual)
      .def_readonly("dual_residual", &hsm::AdmmResult::dual_residual)
      .def_readonly("iters", &hsm::AdmmResult::iters)
      .def_readonly("converged", &hsm::AdmmResult::converged);

  // Prox operators on hierarchies.
  m.def(
      "prox_gl",
      [](const Eigen::VectorXd& y, const hsm::Hierarchy& h, double lambda,
         const std::vector<double>& weights) {
        hsm::GroupStructure gs = hsm::group_structure_gl(h, weights);
        if (h.is_forest()) return hsm::prox_gl_tree(y, h, lambda, gs);
        return hsm::prox_gl_dual_bcd(y, gs, lambda);
      },
      py::arg("y"), py::arg("hierarchy"), py::arg("lambda_"),
      py::arg("weights") = std::vector<double>{},
      "Prox of the descendant-group penalty; one-pass on forests, dual "
      "descent otherwise");
  m.def(
      "prox_log",
      [](const Eigen::VectorXd& y, const hsm::Hierarchy& h, double lambda,
         const std::vector<double>& node_weights) {
        return hsm::prox_log_path_bcd(y, h, hsm::path_decompose(h), lambda,
                                      node_weights);
      },
      py::arg("y"), py::arg("hierarchy"), py::arg("lambda_"),
      py::arg("node_weights") = std::vector<double>{},
      "Prox of the ancestor-group penalty via block descent over a path "
      "decomposition; exact in one cycle on path hierarchies");

  // Chain specializations.  Empty weights select the sqrt-group-size
  // defaults of the matching group structure.
  m.def(
      "prox_log_path",
      [](const Eigen::VectorXd& y, const std::vector<int>& sizes,
         double lambda, const std::vector<double>& weights) {
        Eigen::VectorXd w =
            weights.empty()
                ? group_weights(hsm::nested_groups(sizes))
                : Eigen::Map<const Eigen::VectorXd>(
                      weights.data(), static_cast<Eigen::Index>(weights.size()));
        return hsm::prox_log_path(y, sizes, lambda, w);
      },
      py::arg("y"), py::arg("node_sizes"), py::arg("lambda_"),
      py::arg("weights") = std::vector<double>{},
      "Exact chain prox for the nested ancestor groups");
  m.def(
      "prox_gl_path",
      [](const Eigen::VectorXd& y, const std::vector<int>& sizes,
         double lambda, const std::vector<double>& weights) {
        Eigen::VectorXd w =
            weights.empty()
                ? group_weights(hsm::group_structure_gl(hsm::Hierarchy::path(sizes)))
                : Eigen::Map<const Eigen::VectorXd>(
                      weights.data(), static_cast<Eigen::Index>(weights.size()));
        return hsm::prox_gl_path(y, sizes, lambda, w);
      },
      py::arg("y"), py::arg("node_sizes"), py::arg("lambda_"),
      py::arg("weights") = std::vector<double>{},
      "One-pass chain prox for the suffix descendant groups");
  m.def(
      "prox_mgl_path",
      [](const Eigen::VectorXd& y, const std::vector<int>& sizes,
         double lambda) {
        return hsm::prox_mgl_path(y, sizes, lambda, hsm::mgl_weights(sizes));
      },
      py::arg("y"), py::arg("node_sizes"), py::arg("lambda_"),
      "Backward-sweep chain prox for the multilevel penalty with the "
      "standard decaying weight table");

  m.def(
      "path_decompose",
      [](const hsm::Hierarchy& h) { return hsm::path_decompose(h).paths; },
      py::arg("hierarchy"),
      "Greedy cover of the node set by edge-connected directed paths");

  // Regression.
  m.def(
      "fit_regression",
      [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
         const hsm::Hierarchy& h, double lambda,
         const std::vector<double>& node_weights, double rho, double tol,
         int max_iters) {
        hsm::AdmmOptions opts;
        opts.rho = rho;
        opts.tol = tol;
        opts.max_iters = max_iters;
        return hsm::admm_regression(y, X, h, hsm::path_decompose(h), lambda,
                                    node_weights, opts);
      },
      py::arg("y"), py::arg("X"), py::arg("hierarchy"), py::arg("lambda_"),
      py::arg("node_weights") = std::vector<double>{}, py::arg("rho") = 1.0,
      py::arg("tol") = 1e-8, py::arg("max_iters") = 100000,
      "Least squares with the ancestor-group penalty, solved by splitting");

  // Banded covariance estimation.
  m.def(
      "estimate_banded",
      [](const Eigen::MatrixXd& S, double lambda, const std::string& kind) {
        return hsm::estimate_banded(S, lambda, penalty_from_name(kind));
      },
      py::arg("S"), py::arg("lambda_"), py::arg("kind") = "log",
      "Band-shrinkage covariance estimate; kind is one of log, gl, mgl");
  m.def("bandwidth", &hsm::bandwidth, py::arg("M"));
  m.def("sample_covariance", &hsm::sample_covariance, py::arg("X"));
  m.def("gen_moving_average", &hsm::gen_moving_average, py::arg("p"),
        py::arg("K"));
  m.def("gen_stair", &hsm::gen_stair, py::arg("p"), py::arg("K"));
  m.def("sample_gaussian", &hsm::sample_gaussian, py::arg("sigma"),
        py::arg("n"), py::arg("seed"));
  m.def("min_eigenvalue", &hsm::min_eigenvalue, py::arg("S"));
  m.def("is_psd", &hsm::is_psd, py::arg("S"), py::arg("tol_scale") = 1e-10);
  m.def("min_band_signal", &hsm::min_band_signal, py::arg("sigma"),
        py::arg("K"));
  m.def(
      "lambda_grid",
      [](const Eigen::MatrixXd& S, const std::string& kind, int count) {
        return hsm::lambda_grid(S, penalty_from_name(kind), count);
      },
      py::arg("S"), py::arg("kind") = "log", py::arg("count") = 50,
      "Log-spaced levels ending at the smallest level that empties all bands");

  // Experiment harness.
  m.def(
      "run_experiment",
      [](const std::string& kind,
         const std::map<std::string, std::string>& options) {
        std::vector<std::pair<std::string, std::string>> kv(options.begin(),
                                                            options.end());
        hsm::Config cfg = hsm::Config::from_pairs(kv);
        hsm::ExperimentResult res = hsm::run_experiment(kind, cfg);
        return py::make_tuple(res.csv, res.note);
      },
      py::arg("kind"), py::arg("options") = std::map<std::string, std::string>{},
      "Run a named experiment; returns (csv, note)");
}

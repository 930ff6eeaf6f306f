#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hsm/covband.hpp"
#include "hsm/harness.hpp"
#include "hsm/hierarchy.hpp"
#include "hsm/io.hpp"
#include "hsm/prox_gl.hpp"
#include "hsm/prox_log.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct ProxArgs {
  std::string regularizer;
  std::string hierarchy_path;
  std::string vector_path;
  double lambda = 0.0;
  std::string weights_path;
  std::string algorithm = "auto";
  std::string out_path;
};

struct CovbandArgs {
  std::string estimator;
  std::string matrix_path;
  std::string data_path;
  double lambda = -1.0;
  int grid = 0;
  std::string out_path;
  std::string out_dir;
};

struct DecomposeArgs {
  std::string hierarchy_path;
  std::string out_path;
};

struct SimulateArgs {
  std::string config_path;
  std::string out_path;
};

// Output goes to the file when a path is set, else to stdout.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_)
        throw std::runtime_error("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<double> load_weights(const std::string& path, int expected) {
  Eigen::VectorXd w = hsm::read_vector_file(path);
  if (w.size() != expected)
    throw std::invalid_argument("weights file has " + std::to_string(w.size()) +
                                " entries, need one per node (" +
                                std::to_string(expected) + ")");
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!(w[i] > 0.0))
      throw std::invalid_argument("weights must be positive");
  return std::vector<double>(w.data(), w.data() + w.size());
}

// Node sizes and the positions of each coordinate along a path hierarchy,
// root first.  Values are remapped so chain algorithms see contiguous blocks.
struct ChainView {
  std::vector<int> sizes;
  std::vector<int> order;     // node ids, root to leaf
  std::vector<int> coords;    // original coordinate for each chain position
  Eigen::VectorXd pack(const Eigen::VectorXd& y) const {
    Eigen::VectorXd out(y.size());
    for (size_t i = 0; i < coords.size(); ++i)
      out[static_cast<Eigen::Index>(i)] = y[coords[i]];
    return out;
  }
  Eigen::VectorXd unpack(const Eigen::VectorXd& b) const {
    Eigen::VectorXd out(b.size());
    for (size_t i = 0; i < coords.size(); ++i)
      out[coords[i]] = b[static_cast<Eigen::Index>(i)];
    return out;
  }
};

ChainView chain_view(const hsm::Hierarchy& h) {
  ChainView view;
  view.order = h.path_order();
  for (int node : view.order) {
    view.sizes.push_back(static_cast<int>(h.node(node).size()));
    for (int idx : h.node(node)) view.coords.push_back(idx);
  }
  return view;
}

int run_prox(const ProxArgs& args) {
  hsm::HierarchyFile hf = hsm::read_hierarchy_file(args.hierarchy_path);
  const hsm::Hierarchy& h = hf.hierarchy;
  Eigen::VectorXd y = hsm::read_vector_file(args.vector_path);
  if (y.size() != h.p())
    throw std::invalid_argument("vector length " + std::to_string(y.size()) +
                                " does not match hierarchy p = " +
                                std::to_string(h.p()));
  if (args.lambda < 0.0)
    throw std::invalid_argument("lambda must be >= 0");

  std::vector<double> node_weights;
  if (!args.weights_path.empty()) {
    if (args.regularizer == "mgl")
      throw std::invalid_argument(
          "mgl uses its built-in weights; --weights is not supported");
    node_weights = load_weights(args.weights_path, h.node_count());
  }

  std::string algorithm = args.algorithm;
  Eigen::VectorXd beta;
  std::vector<int> knots;
  int cycles = 0;
  bool converged = true;
  double violation = 0.0;
  const double lambda = args.lambda;

  if (args.regularizer == "gl") {
    hsm::GroupStructure gs = hsm::group_structure_gl(h, node_weights);
    if (algorithm == "auto") algorithm = h.is_forest() ? "tree" : "dual";
    if (algorithm == "path" && !h.is_path())
      throw std::invalid_argument("--algorithm path needs a path hierarchy");
    hsm::GlProxSolution sol;
    if (algorithm == "path") {
      ChainView view = chain_view(h);
      Eigen::VectorXd w(h.node_count());
      for (int d = 0; d < h.node_count(); ++d)
        w[d] = gs.groups[static_cast<size_t>(view.order[d])].weight;
      sol = hsm::prox_gl_path(view.pack(y), view.sizes, lambda, w);
      sol.beta = view.unpack(sol.beta);
    } else if (algorithm == "tree") {
      sol = hsm::prox_gl_tree(y, h, lambda, gs);
    } else if (algorithm == "dual" || algorithm == "naive") {
      sol = hsm::prox_gl_dual_bcd(y, gs, lambda);
      converged = sol.converged;
    } else {
      throw std::invalid_argument("unknown algorithm: " + algorithm);
    }
    beta = sol.beta;
    cycles = sol.cycles;
    hsm::GlProxSolution cert;
    if (h.is_forest()) {
      cert = hsm::prox_gl_tree(y, h, lambda, gs, true);
    } else {
      hsm::GlProxOptions copts;
      copts.want_duals = true;
      cert = hsm::prox_gl_dual_bcd(y, gs, lambda, copts);
    }
    cert.beta = beta;
    violation =
        hsm::verify_gl_optimality(y, cert, gs, lambda, 1e-8).max_violation;
  } else if (args.regularizer == "log") {
    if (algorithm == "dual")
      throw std::invalid_argument("log has no dual algorithm");
    if (algorithm == "auto") algorithm = h.is_path() ? "path" : "path-bcd";
    if (algorithm == "path" && !h.is_path())
      throw std::invalid_argument("--algorithm path needs a path hierarchy");
    hsm::GroupStructure gs = hsm::group_structure_log(h, node_weights);
    hsm::LogProxSolution sol;
    if (algorithm == "path") {
      ChainView view = chain_view(h);
      Eigen::VectorXd w(h.node_count());
      for (int d = 0; d < h.node_count(); ++d)
        w[d] = gs.groups[static_cast<size_t>(view.order[d])].weight;
      Eigen::VectorXd packed = view.pack(y);
      sol = hsm::prox_log_path(packed, view.sizes, lambda, w, true);
      hsm::GroupStructure chain_gs = hsm::nested_groups(
          view.sizes, std::vector<double>(w.data(), w.data() + w.size()));
      violation = hsm::verify_log_optimality(packed, sol, chain_gs, lambda,
                                             1e-8)
                      .max_violation;
      sol.beta = view.unpack(sol.beta);
    } else if (algorithm == "naive") {
      hsm::LogProxOptions opts;
      opts.want_latents = true;
      sol = hsm::prox_log_naive_bcd(y, gs, lambda, opts);
      violation =
          hsm::verify_log_optimality(y, sol, gs, lambda, 1e-8).max_violation;
    } else if (algorithm == "path-bcd") {
      hsm::PathDecomposition pd = hsm::path_decompose(h);
      hsm::LogProxOptions opts;
      opts.want_latents = true;
      sol = hsm::prox_log_path_bcd(y, h, pd, lambda, node_weights, opts);
      violation =
          hsm::verify_log_optimality(y, sol, gs, lambda, 1e-8).max_violation;
    } else {
      throw std::invalid_argument("unknown algorithm: " + algorithm);
    }
    beta = sol.beta;
    knots = sol.knots;
    cycles = sol.cycles;
    converged = sol.converged || algorithm == "path";
  } else if (args.regularizer == "mgl") {
    if (algorithm != "auto" && algorithm != "path")
      throw std::invalid_argument("mgl supports only the path algorithm");
    if (!h.is_path())
      throw std::invalid_argument("mgl needs a path hierarchy");
    algorithm = "path";
    ChainView view = chain_view(h);
    hsm::MglWeights w = hsm::MglWeights::standard(view.sizes);
    hsm::MglProxSolution sol =
        hsm::prox_mgl_path(view.pack(y), view.sizes, lambda, w);
    violation =
        hsm::mgl_stationarity_residual(view.pack(y), view.sizes, lambda, w, sol);
    beta = view.unpack(sol.beta);
    cycles = sol.cycles;
    converged = sol.converged;
  } else {
    throw std::invalid_argument("unknown regularizer: " + args.regularizer);
  }

  OutputTarget target(args.out_path);
  std::ostream& out = target.stream();
  out << "# regularizer = " << args.regularizer << "\n";
  out << "# algorithm = " << algorithm << "\n";
  out << "# lambda = " << hsm::format_double(lambda) << "\n";
  if (args.regularizer == "log") {
    out << "# knots =";
    for (int k : knots) out << " " << k;
    out << "\n";
  }
  out << "# cycles = " << cycles << "\n";
  out << "# max_kkt_violation = " << hsm::format_double(violation) << "\n";
  hsm::write_vector(out, beta);
  if (!converged) {
    std::cerr << "error: solver did not reach tolerance\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int run_covband(const CovbandArgs& args) {
  hsm::BandPenalty kind;
  if (args.estimator == "gl")
    kind = hsm::BandPenalty::Gl;
  else if (args.estimator == "mgl")
    kind = hsm::BandPenalty::Mgl;
  else if (args.estimator == "log")
    kind = hsm::BandPenalty::Log;
  else
    throw std::invalid_argument("unknown estimator: " + args.estimator);

  Eigen::MatrixXd S;
  if (!args.matrix_path.empty()) {
    S = hsm::read_matrix_file(args.matrix_path, true);
  } else {
    Eigen::MatrixXd X = hsm::read_matrix_file(args.data_path, false);
    S = hsm::sample_covariance(X);
  }

  if (args.grid > 0) {
    if (args.out_dir.empty())
      throw std::invalid_argument("--lambda-grid needs --out-dir");
    std::filesystem::create_directories(args.out_dir);
    std::vector<double> grid = hsm::lambda_grid(S, kind, args.grid);
    std::string summary_path = args.out_path.empty()
                                   ? args.out_dir + "/summary.csv"
                                   : args.out_path;
    std::ofstream summary(summary_path);
    if (!summary)
      throw std::runtime_error("cannot open output file: " + summary_path);
    hsm::CsvWriter csv(summary);
    csv.metadata("estimator", args.estimator);
    csv.metadata("grid_size", std::to_string(grid.size()));
    csv.header({"lambda", "bandwidth", "min_eigenvalue", "frobenius_change",
                "estimate_file"});
    for (size_t i = 0; i < grid.size(); ++i) {
      hsm::BandEstimate est = hsm::estimate_banded(S, grid[i], kind);
      std::string name = "estimate_" + std::to_string(i + 1) + ".csv";
      hsm::write_matrix_file(args.out_dir + "/" + name, est.sigma);
      csv.row({hsm::CsvWriter::cell(grid[i]),
               hsm::CsvWriter::cell(est.bandwidth),
               hsm::CsvWriter::cell(hsm::min_eigenvalue(est.sigma)),
               hsm::CsvWriter::cell((est.sigma - S).norm()),
               name});
    }
    std::cout << "wrote " << grid.size() << " estimates and " << summary_path
              << "\n";
    return kExitOk;
  }

  if (args.lambda < 0.0)
    throw std::invalid_argument("pass --lambda >= 0 or --lambda-grid");
  hsm::BandEstimate est = hsm::estimate_banded(S, args.lambda, kind);
  if (args.out_path.empty()) {
    hsm::write_matrix(std::cout, est.sigma);
  } else {
    hsm::write_matrix_file(args.out_path, est.sigma);
  }
  std::cout << "bandwidth = " << est.bandwidth << "\n";
  std::cout << "min_eigenvalue = "
            << hsm::format_double(hsm::min_eigenvalue(est.sigma)) << "\n";
  if (kind == hsm::BandPenalty::Log) {
    std::cout << "knots =";
    for (int k : est.knots) std::cout << " " << k;
    std::cout << "\n";
  }
  return kExitOk;
}

int run_decompose(const DecomposeArgs& args) {
  hsm::HierarchyFile hf = hsm::read_hierarchy_file(args.hierarchy_path);
  const hsm::Hierarchy& h = hf.hierarchy;
  hsm::PathDecomposition pd = hsm::path_decompose(h);

  OutputTarget target(args.out_path);
  std::ostream& out = target.stream();
  out << "# paths = " << pd.paths.size() << "\n";
  for (const auto& path : pd.paths) {
    out << "path";
    for (int node : path) out << " " << hf.node_ids[static_cast<size_t>(node)];
    out << "\n";
  }
  out << "# induced ancestor groups, one block per path\n";
  for (size_t b = 0; b < pd.paths.size(); ++b) {
    out << "block " << b + 1 << "\n";
    for (int node : pd.paths[b]) {
      out << "group " << hf.node_ids[static_cast<size_t>(node)] << ":";
      std::vector<int> indices;
      for (int a : h.ancestors(node))
        for (int idx : h.node(a)) indices.push_back(idx);
      std::sort(indices.begin(), indices.end());
      for (int idx : indices) out << " " << idx + 1;
      out << "\n";
    }
  }
  return kExitOk;
}

int run_simulate(const SimulateArgs& args) {
  hsm::Config cfg = hsm::Config::parse_file(args.config_path);
  std::string kind = cfg.get_string("experiment", "");
  if (kind.empty())
    throw std::invalid_argument("config must set experiment = <kind>");
  std::string out_path = cfg.get_string("out", "");
  if (!args.out_path.empty()) out_path = args.out_path;

  hsm::ExperimentResult result = hsm::run_experiment(kind, cfg);
  OutputTarget target(out_path);
  target.stream() << result.csv;
  if (!result.note.empty()) std::cout << result.note;
  if (!out_path.empty())
    std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical sparsity toolkit: proximal operators, banded "
               "covariance estimation, path decomposition, and experiments"};
  app.require_subcommand(1);

  ProxArgs prox;
  CLI::App* prox_cmd = app.add_subcommand(
      "prox", "Evaluate a hierarchical proximal operator");
  prox_cmd->add_option("--reg", prox.regularizer, "Regularizer: gl, log, mgl")
      ->required();
  prox_cmd->add_option("--hierarchy", prox.hierarchy_path, "Hierarchy file")
      ->required();
  prox_cmd->add_option("--input", prox.vector_path, "Input vector file")
      ->required();
  prox_cmd->add_option("--lambda", prox.lambda, "Penalty level")->required();
  prox_cmd->add_option("--weights", prox.weights_path,
                       "Per-node group weights file (default sqrt of size)");
  prox_cmd->add_option("--algorithm", prox.algorithm,
                       "auto, naive, path, or dual");
  prox_cmd->add_option("--out", prox.out_path,
                       "Output vector file (default stdout)");

  CovbandArgs covband;
  CLI::App* covband_cmd = app.add_subcommand(
      "covband", "Banded covariance estimation");
  covband_cmd
      ->add_option("--est", covband.estimator, "Estimator: gl, mgl, log")
      ->required();
  auto* matrix_opt = covband_cmd->add_option(
      "--matrix", covband.matrix_path, "Symmetric matrix CSV");
  auto* data_opt = covband_cmd->add_option(
      "--data", covband.data_path, "n x p data CSV (rows are samples)");
  matrix_opt->excludes(data_opt);
  auto* lambda_opt =
      covband_cmd->add_option("--lambda", covband.lambda, "Penalty level");
  auto* grid_opt = covband_cmd->add_option(
      "--lambda-grid", covband.grid, "Number of log-spaced levels to sweep");
  lambda_opt->excludes(grid_opt);
  covband_cmd->add_option("--out", covband.out_path,
                          "Estimate file, or summary file in grid mode");
  covband_cmd->add_option("--out-dir", covband.out_dir,
                          "Directory for per-level estimates (grid mode)");

  DecomposeArgs decompose;
  CLI::App* decompose_cmd = app.add_subcommand(
      "decompose", "Cover a hierarchy's DAG with directed paths");
  decompose_cmd
      ->add_option("--hierarchy", decompose.hierarchy_path, "Hierarchy file")
      ->required();
  decompose_cmd->add_option("--out", decompose.out_path,
                            "Output file (default stdout)");

  SimulateArgs simulate;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Run a configured experiment and write its CSV");
  simulate_cmd->add_option("--config", simulate.config_path, "Config file")
      ->required();
  simulate_cmd->add_option("--out", simulate.out_path,
                           "Output CSV (overrides the config's out key)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (prox_cmd->parsed()) return run_prox(prox);
    if (covband_cmd->parsed()) return run_covband(covband);
    if (decompose_cmd->parsed()) return run_decompose(decompose);
    if (simulate_cmd->parsed()) return run_simulate(simulate);
  } catch (const hsm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

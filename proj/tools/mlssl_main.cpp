// Command-line harness for multilayer semi-supervised learning with the
// power mean Laplacian regularizer. Subcommands cover the SBM experiment
// grids, the scaling study, dataset runs, and one-shot solves.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mlssl/experiments.hpp"
#include "mlssl/matfree.hpp"
#include "mlssl/version.hpp"

namespace {

mlssl::index_t env_workers() {
  const char* raw = std::getenv("MLSSL_WORKERS");
  if (!raw) return 1;
  long v = std::strtol(raw, nullptr, 10);
  return v >= 1 ? static_cast<mlssl::index_t>(v) : 1;
}

void add_common(CLI::App* cmd, mlssl::ExperimentConfig& config,
                std::vector<double>& p_values, bool& dense_flag) {
  cmd->add_option("--p", p_values, "power mean parameter (repeatable)");
  cmd->add_option("--lambda", config.lambda, "regularization strength");
  cmd->add_option("--labels", config.label_fractions,
                  "label fractions per class (repeatable)");
  cmd->add_option("--seed", config.seed, "base RNG seed");
  cmd->add_option("--out", config.out_path, "output CSV path")->required();
  cmd->add_option("--graphs", config.graphs, "graphs per cell");
  cmd->add_option("--label-samples", config.label_samples,
                  "label draws per graph");
  cmd->add_option("--cluster-size", config.cluster_size, "nodes per class");
  cmd->add_flag("--matrix-free", config.matrix_free,
                "use the contour/Krylov path for integer p < 0");
  cmd->add_flag("--dense", dense_flag, "force the dense path (default)");
  cmd->add_flag("--self-loops", config.self_loops,
                "give isolated nodes a unit self-loop instead of failing");
}

void finish(const mlssl::ExperimentConfig& config, const std::string& kind,
            const mlssl::ResultTable& table) {
  mlssl::write_csv(table, config.out_path);
  mlssl::write_sidecar(config, kind, config.out_path);
  std::cout << kind << ": wrote " << table.rows.size() << " rows to "
            << config.out_path << "\n";
}

int run_solve(const std::string& layers_csv, const std::string& features_csv,
              const std::string& labels_path, mlssl::index_t knn_k, double p,
              double lambda, bool matrix_free, bool self_loops,
              const std::string& out_path) {
  using namespace mlssl;
  DatasetFiles files;
  {
    std::stringstream ss(layers_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) files.mtx_layers.push_back(item);
  }
  {
    std::stringstream ss(features_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) files.feature_layers.push_back(item);
  }
  files.knn_k = knn_k;

  std::vector<SparseMatrix> layers;
  for (const auto& path : files.mtx_layers)
    layers.push_back(read_matrix_market(path));
  for (const auto& path : files.feature_layers)
    layers.push_back(knn_graph(read_features_csv(path), files.knn_k));
  MultilayerGraph graph = make_multilayer(std::move(layers));

  // labels file lists only the labeled nodes
  std::ifstream in(labels_path);
  if (!in) throw std::invalid_argument("cannot open " + labels_path);
  std::vector<int> truth(static_cast<std::size_t>(graph.n), -1);
  std::vector<char> mask(static_cast<std::size_t>(graph.n), 0);
  int num_classes = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw std::invalid_argument(labels_path + ": expected node_id,class");
    index_t node = std::stoll(a);
    int cls = std::stoi(b);
    if (node < 0 || node >= graph.n)
      throw std::invalid_argument(labels_path + ": node out of range: " + a);
    if (cls < 1) throw std::invalid_argument(labels_path + ": classes are 1-based");
    truth[static_cast<std::size_t>(node)] = cls - 1;
    mask[static_cast<std::size_t>(node)] = 1;
    num_classes = std::max(num_classes, cls);
  }
  if (num_classes < 2)
    throw std::invalid_argument("solve: need labeled nodes from >= 2 classes");
  for (auto& t : truth)
    if (t < 0) t = 0;  // placeholder; unlabeled truth is unused

  LabelingProblem prob =
      make_labeling_problem(truth, mask, num_classes, lambda, p, false);
  IsolatedNodePolicy policy =
      self_loops ? IsolatedNodePolicy::AddSelfLoop : IsolatedNodePolicy::Error;
  LabelingResult res;
  bool integer_negative = p < 0.0 && p == std::floor(p) && std::isfinite(p);
  if (matrix_free && integer_negative) {
    MatrixFreeConfig mf;
    mf.p = static_cast<int>(p);
    mf.lambda = lambda;
    res = matfree_ssl_solve(graph, prob, mf, nullptr, policy);
  } else {
    res = solve_ssl_dense(graph, prob, nullptr, policy);
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open " + out_path);
  out << "node_id,predicted_class\n";
  for (index_t i = 0; i < graph.n; ++i)
    out << i << "," << res.predicted_labels[static_cast<std::size_t>(i)] + 1
        << "\n";
  std::cout << "solve: wrote predictions for " << graph.n << " nodes to "
            << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised learning on multilayer graphs with the power "
               "mean Laplacian (v" MLSSL_VERSION ")"};
  app.require_subcommand(1);

  mlssl::ExperimentConfig config;
  config.workers = env_workers();
  std::vector<double> p_values;
  bool dense_flag = false;

  auto* grid = app.add_subcommand("grid2x2",
                                  "two-layer SBM sweep: layer-2 "
                                  "informativeness x label fraction");
  add_common(grid, config, p_values, dense_flag);
  grid->add_option("--layer2-gaps", config.layer2_gaps,
                   "p_in - p_out values for layer 2");
  grid->add_option("--layer1-gap", config.layer1_gap, "p_in - p_out, layer 1");
  grid->add_option("--prob-sum", config.prob_sum, "p_in + p_out per layer");

  auto* unb = app.add_subcommand(
      "unbalanced", "n1 + n2 labeled split sweep, uniform vs weighted loss");
  add_common(unb, config, p_values, dense_flag);

  auto* info3 = app.add_subcommand(
      "info3", "three layers, three classes, layer t informative of class t");
  add_common(info3, config, p_values, dense_flag);
  info3->add_option("--gaps", config.info3_gaps, "p_in - p_out values");
  info3->add_option("--prob-sum", config.prob_sum, "p_in + p_out per layer");

  auto* lam = app.add_subcommand("lambda-sweep",
                                 "regularization sweep on the fixed "
                                 "informative + noise SBM pair");
  add_common(lam, config, p_values, dense_flag);
  lam->add_option("--lambdas", config.lambda_list, "lambda values");

  auto* timing = app.add_subcommand(
      "timing", "matrix-free L_{-1} wall time across graph sizes");
  add_common(timing, config, p_values, dense_flag);
  timing->add_option("--sizes", config.timing_sizes, "node counts");
  timing->add_option("--reps", config.timing_reps, "repetitions per size");

  auto* dataset = app.add_subcommand(
      "dataset", "kNN-layer pipeline over feature/adjacency files");
  add_common(dataset, config, p_values, dense_flag);
  dataset->add_option("--layer", config.dataset.mtx_layers,
                      "Matrix Market adjacency file (repeatable)");
  dataset->add_option("--features", config.dataset.feature_layers,
                      "feature CSV building one kNN layer (repeatable)");
  dataset->add_option("--labels-file", config.dataset.labels_path,
                      "labels CSV: node_id,class (1-based classes)");
  dataset->add_option("--knn", config.dataset.knn_k, "kNN neighbourhood size");
  dataset->add_option("--fractions", config.dataset_fractions,
                      "label fractions per class");
  std::string demo_dir;
  dataset->add_option("--make-demo", demo_dir,
                      "write the synthetic 3-class demo dataset here and use it");

  auto* solve = app.add_subcommand("solve", "one-shot SSL on user files");
  std::string solve_layers, solve_features, solve_labels, solve_out;
  double solve_p = -1.0, solve_lambda = 10.0;
  mlssl::index_t solve_knn = 10;
  bool solve_mf = false, solve_self_loops = false, solve_dense = false;
  solve->add_option("--layers", solve_layers,
                    "comma-separated Matrix Market files");
  solve->add_option("--features", solve_features,
                    "comma-separated feature CSVs (kNN layers)");
  solve->add_option("--labels-file", solve_labels,
                    "labeled nodes CSV: node_id,class")->required();
  solve->add_option("--knn", solve_knn, "kNN neighbourhood size");
  solve->add_option("--p", solve_p, "power mean parameter");
  solve->add_option("--lambda", solve_lambda, "regularization strength");
  solve->add_flag("--matrix-free", solve_mf, "contour/Krylov path");
  solve->add_flag("--dense", solve_dense, "force dense path");
  solve->add_flag("--self-loops", solve_self_loops, "self-loop policy");
  solve->add_option("--out", solve_out, "predictions CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  if (!p_values.empty()) config.p_list = p_values;
  config.lambda_explicit = grid->count("--lambda") || unb->count("--lambda") ||
                           info3->count("--lambda") ||
                           timing->count("--lambda") ||
                           dataset->count("--lambda");
  if (dense_flag) config.matrix_free = false;

  try {
    if (grid->parsed()) {
      finish(config, "grid2x2", mlssl::run_grid2x2(config));
    } else if (unb->parsed()) {
      finish(config, "unbalanced", mlssl::run_unbalanced(config));
    } else if (info3->parsed()) {
      finish(config, "info3", mlssl::run_info_independent(config));
    } else if (lam->parsed()) {
      finish(config, "lambda-sweep", mlssl::run_lambda_sweep(config));
    } else if (timing->parsed()) {
      finish(config, "timing", mlssl::run_timing(config));
    } else if (dataset->parsed()) {
      if (!demo_dir.empty()) {
        mlssl::write_synthetic_demo(demo_dir, 100, config.seed);
        config.dataset.feature_layers = {demo_dir + "/features0.csv",
                                         demo_dir + "/features1.csv"};
        config.dataset.labels_path = demo_dir + "/labels.csv";
      }
      if (config.dataset.labels_path.empty())
        throw std::invalid_argument("dataset: --labels-file is required");
      finish(config, "dataset", mlssl::run_dataset(config));
    } else if (solve->parsed()) {
      return run_solve(solve_layers, solve_features, solve_labels, solve_knn,
                       solve_p, solve_lambda, solve_mf && !solve_dense,
                       solve_self_loops, solve_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

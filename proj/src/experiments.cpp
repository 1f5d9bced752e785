#include "mlssl/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "mlssl/version.hpp"

namespace mlssl {

namespace {

using json = nlohmann::ordered_json;

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct LayerEig {
  Eigen::MatrixXd u;
  Eigen::VectorXd ev;
};

std::vector<LayerEig> dense_layer_eigs(const MultilayerGraph& g,
                                       IsolatedNodePolicy policy) {
  std::vector<LayerEig> out;
  out.reserve(g.layers.size());
  for (const SparseMatrix& w : g.layers) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        dense_normalized_laplacian(w, policy));
    out.push_back({es.eigenvectors(), es.eigenvalues()});
  }
  return out;
}

Eigen::VectorXd shifted_clamped(const Eigen::VectorXd& ev, double eps,
                                double p) {
  Eigen::VectorXd out = ev;
  double floor_val = p > 0.0 ? 0.0 : 1e-14;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    double v = out(i) + eps;
    if (v < -1e-10)
      throw std::runtime_error("power mean: eigenvalue below clamp");
    out(i) = std::max(v, floor_val);
  }
  return out;
}

// Power mean Laplacian assembled from per-layer eigendecompositions; the
// layer factorizations are reused across every p in a sweep.
Eigen::MatrixXd power_mean_from_eigs(const std::vector<LayerEig>& eigs,
                                     double p) {
  double eps = shift_for_p(p);
  const Eigen::Index n = eigs[0].u.rows();
  const double t = static_cast<double>(eigs.size());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  if (p == 0.0) {
    for (const LayerEig& le : eigs) {
      Eigen::VectorXd lam = shifted_clamped(le.ev, eps, p);
      for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = std::log(lam(i));
      acc += le.u * lam.asDiagonal() * le.u.transpose();
    }
    acc /= t;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(acc);
    Eigen::VectorXd ex = es.eigenvalues();
    for (Eigen::Index i = 0; i < ex.size(); ++i) ex(i) = std::exp(ex(i));
    return es.eigenvectors() * ex.asDiagonal() * es.eigenvectors().transpose();
  }
  for (const LayerEig& le : eigs) {
    Eigen::VectorXd lam = shifted_clamped(le.ev, eps, p);
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = std::pow(lam(i), p);
    acc += le.u * lam.asDiagonal() * le.u.transpose();
  }
  acc /= t;
  return dense_matrix_power(acc, 1.0 / p);
}

bool use_matrix_free(const ExperimentConfig& config, double p) {
  return config.matrix_free && p < 0.0 && p == std::floor(p) &&
         std::isfinite(p);
}

double run_one(const ExperimentConfig& config, const MultilayerGraph& graph,
               const Eigen::MatrixXd* lp_dense, const std::vector<int>& truth,
               int num_classes, const std::vector<char>& mask, double p,
               double lambda, bool weighted) {
  LabelingProblem prob =
      make_labeling_problem(truth, mask, num_classes, lambda, p, weighted);
  IsolatedNodePolicy policy = config.self_loops ? IsolatedNodePolicy::AddSelfLoop
                                                : IsolatedNodePolicy::Error;
  if (use_matrix_free(config, p)) {
    MatrixFreeConfig mf;
    mf.p = static_cast<int>(p);
    mf.lambda = lambda;
    LabelingResult res = matfree_ssl_solve(graph, prob, mf, &truth, policy);
    return *res.test_error;
  }
  LabelingResult res = dense_ssl_solve(*lp_dense, prob, &truth);
  return *res.test_error;
}

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;
};

Stat summarize(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  double varsum = 0.0;
  for (double x : xs) varsum += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(varsum / static_cast<double>(xs.size()));
  return s;
}

void run_cells(index_t count, index_t workers,
               const std::function<void(index_t)>& body) {
  if (workers <= 1 || count <= 1) {
    for (index_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<index_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      index_t i = next.fetch_add(1);
      if (i >= count) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  index_t nw = std::min(workers, count);
  for (index_t w = 0; w < nw; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double elapsed_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

MsbmParams two_layer_params(const ExperimentConfig& config, double gap2) {
  MsbmParams params;
  params.k = 2;
  params.cluster_size = config.cluster_size;
  params.layer_probs = {
      {(config.prob_sum + config.layer1_gap) / 2.0,
       (config.prob_sum - config.layer1_gap) / 2.0},
      {(config.prob_sum + gap2) / 2.0, (config.prob_sum - gap2) / 2.0}};
  return params;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
  return mix64(mix64(mix64(base) ^ mix64(a ^ 0x517cc1b727220a95ull) ^
                     mix64(b ^ 0x2545f4914f6cdd1dull)) ^
               mix64(c));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open " + path + " for write");
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

void write_sidecar(const ExperimentConfig& config, const std::string& kind,
                   const std::string& csv_path) {
  json j;
  j["experiment"] = kind;
  j["library_version"] = MLSSL_VERSION;
  j["seed"] = config.seed;
  j["p_list"] = config.p_list;
  j["lambda"] = config.lambda;
  j["label_fractions"] = config.label_fractions;
  j["graphs"] = config.graphs;
  j["label_samples"] = config.label_samples;
  j["matrix_free"] = config.matrix_free;
  j["self_loops"] = config.self_loops;
  j["workers"] = config.workers;
  j["cluster_size"] = config.cluster_size;
  j["layer1_gap"] = config.layer1_gap;
  j["layer2_gaps"] = config.layer2_gaps;
  j["prob_sum"] = config.prob_sum;
  j["labeled_total"] = config.labeled_total;
  json splits = json::array();
  for (const auto& [a, b] : config.splits) splits.push_back({a, b});
  j["splits"] = splits;
  j["info3_gaps"] = config.info3_gaps;
  j["lambda_list"] = config.lambda_list;
  j["timing_sizes"] = config.timing_sizes;
  j["timing_reps"] = config.timing_reps;
  j["dataset_fractions"] = config.dataset_fractions;
  if (!config.dataset.mtx_layers.empty() ||
      !config.dataset.feature_layers.empty()) {
    j["dataset"] = {{"mtx_layers", config.dataset.mtx_layers},
                    {"feature_layers", config.dataset.feature_layers},
                    {"labels", config.dataset.labels_path},
                    {"knn_k", config.dataset.knn_k}};
  }
  std::ofstream out(csv_path + ".json", std::ios::binary);
  if (!out)
    throw std::invalid_argument("cannot open " + csv_path + ".json for write");
  out << j.dump(2) << "\n";
}

ResultTable run_grid2x2(const ExperimentConfig& config) {
  ResultTable table;
  table.header = {"layer2_gap", "label_fraction", "p",
                  "path",       "runs",           "mean_error",
                  "std_error",  "seconds"};
  const index_t cells = static_cast<index_t>(config.layer2_gaps.size() *
                                             config.label_fractions.size());
  std::vector<std::vector<std::vector<std::string>>> cell_rows(
      static_cast<std::size_t>(cells));
  IsolatedNodePolicy policy = config.self_loops ? IsolatedNodePolicy::AddSelfLoop
                                                : IsolatedNodePolicy::Error;

  run_cells(cells, config.workers, [&](index_t cell) {
    const std::size_t gi = static_cast<std::size_t>(cell) %
                           config.layer2_gaps.size();
    const std::size_t fi = static_cast<std::size_t>(cell) /
                           config.layer2_gaps.size();
    double gap2 = config.layer2_gaps[gi];
    double frac = config.label_fractions[fi];
    MsbmParams params = two_layer_params(config, gap2);
    std::vector<int> truth = msbm_truth(params);
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<double>> errors(config.p_list.size());
    for (index_t g = 0; g < config.graphs; ++g) {
      MultilayerGraph graph =
          sample_msbm(params, derive_seed(config.seed, cell, g, 0));
      std::vector<LayerEig> eigs;
      bool need_dense = false;
      for (double p : config.p_list)
        if (!use_matrix_free(config, p)) need_dense = true;
      if (need_dense) eigs = dense_layer_eigs(graph, policy);
      std::vector<std::vector<char>> masks;
      for (index_t s = 0; s < config.label_samples; ++s)
        masks.push_back(sample_labels(truth, LabelBudget{{}, frac}, params.k,
                                      derive_seed(config.seed, cell, g, s + 1)));
      for (std::size_t pi = 0; pi < config.p_list.size(); ++pi) {
        double p = config.p_list[pi];
        Eigen::MatrixXd lp;
        if (!use_matrix_free(config, p)) lp = power_mean_from_eigs(eigs, p);
        for (const auto& mask : masks)
          errors[pi].push_back(run_one(config, graph, &lp, truth, params.k,
                                       mask, p, config.lambda, false));
      }
    }
    double secs = elapsed_seconds(t0);
    for (std::size_t pi = 0; pi < config.p_list.size(); ++pi) {
      Stat st = summarize(errors[pi]);
      cell_rows[static_cast<std::size_t>(cell)].push_back(
          {format_double(gap2), format_double(frac),
           format_double(config.p_list[pi]),
           use_matrix_free(config, config.p_list[pi]) ? "matrix-free" : "dense",
           std::to_string(errors[pi].size()), format_double(st.mean),
           format_double(st.stddev), format_double(secs)});
    }
  });
  for (const auto& rows : cell_rows)
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  return table;
}

ResultTable run_unbalanced(const ExperimentConfig& config) {
  ResultTable table;
  table.header = {"n1",   "n2",         "p",         "loss",
                  "runs", "mean_error", "std_error", "seconds"};
  const index_t cells = static_cast<index_t>(config.splits.size());
  std::vector<std::vector<std::vector<std::string>>> cell_rows(
      static_cast<std::size_t>(cells));
  IsolatedNodePolicy policy = config.self_loops ? IsolatedNodePolicy::AddSelfLoop
                                                : IsolatedNodePolicy::Error;

  run_cells(cells, config.workers, [&](index_t cell) {
    auto [n1, n2] = config.splits[static_cast<std::size_t>(cell)];
    MsbmParams params = two_layer_params(config, 0.0);  // layer 2 pure noise
    std::vector<int> truth = msbm_truth(params);
    LabelBudget budget{{n1, n2}, -1.0};
    auto t0 = std::chrono::steady_clock::now();
    // [p][weighted]
    std::vector<std::array<std::vector<double>, 2>> errors(
        config.p_list.size());
    for (index_t g = 0; g < config.graphs; ++g) {
      MultilayerGraph graph =
          sample_msbm(params, derive_seed(config.seed, cell, g, 0));
      std::vector<LayerEig> eigs = dense_layer_eigs(graph, policy);
      std::vector<std::vector<char>> masks;
      for (index_t s = 0; s < config.label_samples; ++s)
        masks.push_back(sample_labels(truth, budget, params.k,
                                      derive_seed(config.seed, cell, g, s + 1)));
      for (std::size_t pi = 0; pi < config.p_list.size(); ++pi) {
        double p = config.p_list[pi];
        Eigen::MatrixXd lp;
        if (!use_matrix_free(config, p)) lp = power_mean_from_eigs(eigs, p);
        for (const auto& mask : masks)
          for (int weighted = 0; weighted < 2; ++weighted)
            errors[pi][static_cast<std::size_t>(weighted)].push_back(
                run_one(config, graph, &lp, truth, params.k, mask, p,
                        config.lambda, weighted == 1));
      }
    }
    double secs = elapsed_seconds(t0);
    for (std::size_t pi = 0; pi < config.p_list.size(); ++pi) {
      for (int weighted = 0; weighted < 2; ++weighted) {
        Stat st = summarize(errors[pi][static_cast<std::size_t>(weighted)]);
        cell_rows[static_cast<std::size_t>(cell)].push_back(
            {std::to_string(n1), std::to_string(n2),
             format_double(config.p_list[pi]),
             weighted ? "weighted" : "uniform",
             std::to_string(
                 errors[pi][static_cast<std::size_t>(weighted)].size()),
             format_double(st.mean), format_double(st.stddev),
             format_double(secs)});
      }
    }
  });
  for (const auto& rows : cell_rows)
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  return table;
}

ResultTable run_info_independent(const ExperimentConfig& config) {
  ResultTable table;
  table.header = {"gap",  "label_fraction", "layers",    "p",
                  "runs", "mean_error",     "std_error", "seconds"};
  const index_t cells = static_cast<index_t>(config.info3_gaps.size() *
                                             config.label_fractions.size());
  std::vector<std::vector<std::vector<std::string>>> cell_rows(
      static_cast<std::size_t>(cells));
  IsolatedNodePolicy policy = config.self_loops ? IsolatedNodePolicy::AddSelfLoop
                                                : IsolatedNodePolicy::Error;

  run_cells(cells, config.workers, [&](index_t cell) {
    const std::size_t gi = static_cast<std::size_t>(cell) %
                           config.info3_gaps.size();
    const std::size_t fi = static_cast<std::size_t>(cell) /
                           config.info3_gaps.size();
    double gap = config.info3_gaps[gi];
    double frac = config.label_fractions[fi];
    double pin = (config.prob_sum + gap) / 2.0;
    double pout = (config.prob_sum - gap) / 2.0;
    const int k = 3;
    std::vector<int> truth(static_cast<std::size_t>(3 * config.cluster_size));
    for (std::size_t i = 0; i < truth.size(); ++i)
      truth[i] = static_cast<int>(i / static_cast<std::size_t>(config.cluster_size));
    auto t0 = std::chrono::steady_clock::now();
    // variant 0 = joint, 1..3 = single layer t
    std::vector<std::vector<std::vector<double>>> errors(
        4, std::vector<std::vector<double>>(config.p_list.size()));
    for (index_t g = 0; g < config.graphs; ++g) {
      MultilayerGraph joint =
          sample_info3(pin, pout, config.cluster_size,
                       derive_seed(config.seed, cell, g, 0));
      std::vector<LayerEig> eigs = dense_layer_eigs(joint, policy);
      std::vector<std::vector<char>> masks;
      for (index_t s = 0; s < config.label_samples; ++s)
        masks.push_back(sample_labels(truth, LabelBudget{{}, frac}, k,
                                      derive_seed(config.seed, cell, g, s + 1)));
      for (std::size_t pi = 0; pi < config.p_list.size(); ++pi) {
        double p = config.p_list[pi];
        Eigen::MatrixXd lp = power_mean_from_eigs(eigs, p);
        for (const auto& mask : masks)
          errors[0][pi].push_back(run_one(config, joint, &lp, truth, k, mask,
                                          p, config.lambda, false));
        for (int t = 0; t < 3; ++t) {
          std::vector<LayerEig> single = {eigs[static_cast<std::size_t>(t)]};
          Eigen::MatrixXd lp1 = power_mean_from_eigs(single, p);
          for (const auto& mask : masks)
            errors[static_cast<std::size_t>(t) + 1][pi].push_back(
                run_one(config, joint, &lp1, truth, k, mask, p, config.lambda,
                        false));
        }
      }
    }
    double secs = elapsed_seconds(t0);
    const char* names[4] = {"joint", "layer1", "layer2", "layer3"};
    for (int variant = 0; variant < 4; ++variant)
      for (std::size_t pi = 0; pi < config.p_list.size(); ++pi) {
        Stat st = summarize(errors[static_cast<std::size_t>(variant)][pi]);
        cell_rows[static_cast<std::size_t>(cell)].push_back(
            {format_double(gap), format_double(frac), names[variant],
             format_double(config.p_list[pi]),
             std::to_string(
                 errors[static_cast<std::size_t>(variant)][pi].size()),
             format_double(st.mean), format_double(st.stddev),
             format_double(secs)});
      }
  });
  for (const auto& rows : cell_rows)
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  return table;
}

ResultTable run_lambda_sweep(const ExperimentConfig& config) {
  ResultTable table;
  table.header = {"lambda", "label_fraction", "p",
                  "runs",   "mean_error",     "std_error", "seconds"};
  // Fixed sweep layers: informative (0.09, 0.01), noise (0.05, 0.05).
  MsbmParams params;
  params.k = 2;
  params.cluster_size = config.cluster_size;
  params.layer_probs = {{0.09, 0.01}, {0.05, 0.05}};
  std::vector<int> truth = msbm_truth(params);
  const index_t cells = static_cast<index_t>(config.label_fractions.size());
  std::vector<std::vector<std::vector<std::string>>> cell_rows(
      static_cast<std::size_t>(cells));
  IsolatedNodePolicy policy = config.self_loops ? IsolatedNodePolicy::AddSelfLoop
                                                : IsolatedNodePolicy::Error;

  run_cells(cells, config.workers, [&](index_t cell) {
    double frac = config.label_fractions[static_cast<std::size_t>(cell)];
    auto t0 = std::chrono::steady_clock::now();
    // [lambda][p]
    std::vector<std::vector<std::vector<double>>> errors(
        config.lambda_list.size(),
        std::vector<std::vector<double>>(config.p_list.size()));
    for (index_t g = 0; g < config.graphs; ++g) {
      MultilayerGraph graph =
          sample_msbm(params, derive_seed(config.seed, cell, g, 0));
      std::vector<LayerEig> eigs = dense_layer_eigs(graph, policy);
      std::vector<std::vector<char>> masks;
      for (index_t s = 0; s < config.label_samples; ++s)
        masks.push_back(sample_labels(truth, LabelBudget{{}, frac}, params.k,
                                      derive_seed(config.seed, cell, g, s + 1)));
      for (std::size_t pi = 0; pi < config.p_list.size(); ++pi) {
        Eigen::MatrixXd lp = power_mean_from_eigs(eigs, config.p_list[pi]);
        for (std::size_t li = 0; li < config.lambda_list.size(); ++li)
          for (const auto& mask : masks)
            errors[li][pi].push_back(
                run_one(config, graph, &lp, truth, params.k, mask,
                        config.p_list[pi], config.lambda_list[li], false));
      }
    }
    double secs = elapsed_seconds(t0);
    for (std::size_t li = 0; li < config.lambda_list.size(); ++li)
      for (std::size_t pi = 0; pi < config.p_list.size(); ++pi) {
        Stat st = summarize(errors[li][pi]);
        cell_rows[static_cast<std::size_t>(cell)].push_back(
            {format_double(config.lambda_list[li]), format_double(frac),
             format_double(config.p_list[pi]),
             std::to_string(errors[li][pi].size()), format_double(st.mean),
             format_double(st.stddev), format_double(secs)});
      }
  });
  for (const auto& rows : cell_rows)
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  return table;
}

ResultTable run_timing(const ExperimentConfig& config) {
  ResultTable table;
  table.header = {"n",    "p_in",         "p_out",      "reps",
                  "mean_seconds", "mean_error", "edges_per_layer"};
  // Fig. 4 probabilities at n = 5000, scaled to keep the average degree
  // fixed across sizes (the cost model is per edge).
  const double base_n = 5000.0;
  for (index_t n : config.timing_sizes) {
    double scale = base_n / static_cast<double>(n);
    MsbmParams params;
    params.k = 2;
    params.cluster_size = n / 2;
    params.layer_probs = {{0.05 * scale, 0.025 * scale},
                          {0.05 * scale, 0.025 * scale}};
    std::vector<int> truth = msbm_truth(params);
    std::vector<double> times, errors;
    index_t edges = 0;
    for (index_t rep = 0; rep < config.timing_reps; ++rep) {
      MultilayerGraph graph =
          sample_msbm(params, derive_seed(config.seed, n, rep, 0));
      edges = graph.layers[0].nnz() / 2;
      std::vector<char> mask =
          sample_labels(truth, LabelBudget{{}, 0.10}, params.k,
                        derive_seed(config.seed, n, rep, 1));
      LabelingProblem prob = make_labeling_problem(truth, mask, params.k,
                                                   config.lambda, -1.0, false);
      MatrixFreeConfig mf;
      mf.p = -1;
      mf.lambda = config.lambda;
      auto t0 = std::chrono::steady_clock::now();
      LabelingResult res = matfree_ssl_solve(graph, prob, mf, &truth);
      times.push_back(elapsed_seconds(t0));
      errors.push_back(*res.test_error);
    }
    table.rows.push_back({std::to_string(n),
                          format_double(params.layer_probs[0].first),
                          format_double(params.layer_probs[0].second),
                          std::to_string(times.size()),
                          format_double(summarize(times).mean),
                          format_double(summarize(errors).mean),
                          std::to_string(edges)});
  }
  return table;
}

ResultTable run_dataset(const ExperimentConfig& config) {
  Dataset ds = load_multilayer(config.dataset);
  IsolatedNodePolicy policy = config.self_loops ? IsolatedNodePolicy::AddSelfLoop
                                                : IsolatedNodePolicy::Error;
  ResultTable table;
  table.header = {"label_fraction", "p",         "lambda", "path",
                  "runs",           "mean_error", "std_error", "note"};
  std::vector<LayerEig> eigs;
  bool need_dense = false;
  for (double p : config.p_list)
    if (!use_matrix_free(config, p)) need_dense = true;
  if (need_dense) eigs = dense_layer_eigs(ds.graph, policy);

  for (double frac : config.dataset_fractions) {
    std::vector<std::vector<char>> masks;
    bool all_labeled = frac >= 1.0;
    for (index_t s = 0; s < config.label_samples && !all_labeled; ++s) {
      // per-class counts derive from the true class sizes
      std::vector<char> mask =
          sample_labels(ds.truth, LabelBudget{{}, frac}, ds.num_classes,
                        derive_seed(config.seed, 17, s, 0));
      bool any_unlabeled = false;
      for (char c : mask)
        if (!c) any_unlabeled = true;
      if (!any_unlabeled) all_labeled = true;
      masks.push_back(std::move(mask));
    }
    for (double p : config.p_list) {
      double lambda = config.lambda;
      if (!config.lambda_explicit) lambda = p > 0.0 ? 0.1 : 10.0;
      if (all_labeled) {
        table.rows.push_back({format_double(frac), format_double(p),
                              format_double(lambda),
                              use_matrix_free(config, p) ? "matrix-free"
                                                         : "dense",
                              "0", "", "", "no_unlabeled_nodes"});
        continue;
      }
      Eigen::MatrixXd lp;
      if (!use_matrix_free(config, p)) lp = power_mean_from_eigs(eigs, p);
      std::vector<double> errors;
      for (const auto& mask : masks)
        errors.push_back(run_one(config, ds.graph, &lp, ds.truth,
                                 ds.num_classes, mask, p, lambda, false));
      Stat st = summarize(errors);
      table.rows.push_back({format_double(frac), format_double(p),
                            format_double(lambda),
                            use_matrix_free(config, p) ? "matrix-free"
                                                       : "dense",
                            std::to_string(errors.size()),
                            format_double(st.mean), format_double(st.stddev),
                            ""});
    }
  }
  return table;
}

void write_synthetic_demo(const std::string& dir, index_t nodes_per_class,
                          std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const int k = 3;
  const index_t n = k * nodes_per_class;
  const int d = 20;
  std::mt19937_64 rng(seed);
  auto uniform = [&]() {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  };
  auto normal = [&]() {
    double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
  };
  for (int view = 0; view < 2; ++view) {
    std::vector<std::vector<double>> centers(k, std::vector<double>(d));
    for (auto& c : centers)
      for (double& v : c) v = normal() * 1.5;
    std::ofstream out(dir + "/features" + std::to_string(view) + ".csv",
                      std::ios::binary);
    for (index_t i = 0; i < n; ++i) {
      int cls = static_cast<int>(i / nodes_per_class);
      for (int j = 0; j < d; ++j) {
        double v = centers[static_cast<std::size_t>(cls)]
                          [static_cast<std::size_t>(j)] +
                   0.9 * normal();
        out << (j ? "," : "") << format_double(v);
      }
      out << "\n";
    }
  }
  std::ofstream labels(dir + "/labels.csv", std::ios::binary);
  for (index_t i = 0; i < n; ++i)
    labels << i << "," << (i / nodes_per_class + 1) << "\n";
}

}  // namespace mlssl

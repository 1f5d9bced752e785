#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mlssl/graph.hpp"
#include "mlssl/matfree.hpp"
#include "mlssl/msbm.hpp"

namespace mlssl {

/// Shared experiment settings. Desk-scale defaults shrink the 100-run
/// protocol to graphs x label_samples = 20 runs per cell; raise the two
/// counts to restore the full protocol.
struct ExperimentConfig {
  std::vector<double> p_list = {-10.0, -1.0, 0.0, 1.0, 10.0};
  double lambda = 1.0;
  bool lambda_explicit = false;  // dataset runs default per-p otherwise
  std::vector<double> label_fractions = {0.01, 0.05, 0.10, 0.15, 0.25};
  index_t graphs = 5;
  index_t label_samples = 4;
  std::uint64_t seed = 1;
  std::string out_path;
  bool matrix_free = false;
  bool self_loops = false;
  index_t workers = 1;

  index_t cluster_size = 100;
  double layer1_gap = 0.08;
  std::vector<double> layer2_gaps = {-0.08, -0.04, 0.0, 0.04, 0.08};
  double prob_sum = 0.1;  // p_in + p_out on every layer

  index_t labeled_total = 50;  // unbalanced sweep n1 + n2
  std::vector<std::pair<index_t, index_t>> splits = {
      {1, 49}, {5, 45}, {10, 40}, {25, 25}, {40, 10}, {45, 5}, {49, 1}};

  std::vector<double> info3_gaps = {0.03, 0.06, 0.10};

  std::vector<double> lambda_list = {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};

  std::vector<index_t> timing_sizes = {5000, 10000, 20000, 40000};
  index_t timing_reps = 1;

  DatasetFiles dataset;
  std::vector<double> dataset_fractions = {0.01, 0.05, 0.10, 0.15, 0.20, 0.25};
};

struct ResultTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_double(double v);
void write_csv(const ResultTable& table, const std::string& path);
/// JSON sidecar next to the CSV: full config, seed, library version.
void write_sidecar(const ExperimentConfig& config, const std::string& kind,
                   const std::string& csv_path);

ResultTable run_grid2x2(const ExperimentConfig& config);
ResultTable run_unbalanced(const ExperimentConfig& config);
ResultTable run_info_independent(const ExperimentConfig& config);
ResultTable run_lambda_sweep(const ExperimentConfig& config);
ResultTable run_timing(const ExperimentConfig& config);
ResultTable run_dataset(const ExperimentConfig& config);

/// Writes the synthetic 3-class, 2-view feature dataset fixture
/// (features0.csv, features1.csv, labels.csv) into dir.
void write_synthetic_demo(const std::string& dir, index_t nodes_per_class,
                          std::uint64_t seed);

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c);

}  // namespace mlssl

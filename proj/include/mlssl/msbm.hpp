#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "mlssl/graph.hpp"
#include "mlssl/powermean.hpp"

namespace mlssl {

/// Multilayer stochastic block model: k equal classes of size cluster_size,
/// per-layer within/between edge probabilities.
struct MsbmParams {
  int k = 2;
  index_t cluster_size = 100;
  std::vector<std::pair<double, double>> layer_probs;  // (p_in, p_out) per layer

  index_t n() const { return static_cast<index_t>(k) * cluster_size; }
  index_t num_layers() const { return static_cast<index_t>(layer_probs.size()); }
  void validate() const;
};

/// Ground-truth class of each node: contiguous blocks, 0-based.
std::vector<int> msbm_truth(const MsbmParams& params);

/// Samples each undirected pair independently per layer; no self-edges;
/// layers independent; bit-reproducible given the seed (mt19937_64 with
/// run-length skipping over the lexicographic pair order).
MultilayerGraph sample_msbm(const MsbmParams& params, std::uint64_t seed);

/// Block-constant expectation of a layer, diagonal included (the analysis
/// uses the exact expected matrix even though sampling never draws W_ii).
Eigen::MatrixXd expected_adjacency(const MsbmParams& params, index_t layer);

/// chi_1 = 1, chi_r = sum_{j<=r} 1_{C_j} - r 1_{C_r}; orthogonal, and
/// eigenvectors of every expected adjacency.
std::vector<Eigen::VectorXd> canonical_eigenvectors(int k, index_t cluster_size);

/// Per-layer informativeness 1 - (p_in - p_out)/(p_in + (k-1) p_out) + eps.
std::vector<double> rho_epsilon(const MsbmParams& params, double eps);

/// Expected-case zero-test-error predicate: m_p(rho_eps) < 1 + eps.
/// p = +-inf reduces to the all-layers / some-layer informative rule.
bool predict_zero_error(const MsbmParams& params, double p, double eps);

struct UnbalancedPredicate {
  double exact_bound = 0.0;       // two-term min, necessary and sufficient
  double sufficient_bound = 0.0;  // min{n1/n2, n2/n1}
  double power_mean = 0.0;        // m_p(rho_eps)
  bool zero_error = false;        // power_mean < exact_bound
  bool sufficient_holds = false;  // power_mean < sufficient_bound
};

/// k = 2 only, uniform loss, mu = lambda = 1 (the theorem's scope; other
/// lambda are refused rather than extrapolated).
UnbalancedPredicate predict_zero_error_unbalanced(const MsbmParams& params,
                                                  double p, double eps,
                                                  index_t n1, index_t n2,
                                                  double lambda = 1.0);

/// Closed-form solution matrix F on the expected graph (chi expansion):
/// F(i,r) = c_r n_r (alpha/n + beta G(r, class(i))) plus c_r omega on the
/// labeled one-hot positions. Oracle for dense_ssl_solve.
Eigen::MatrixXd expected_solution_matrix(const MsbmParams& params, double p,
                                         double eps,
                                         const std::vector<char>& labeled_mask,
                                         const Eigen::VectorXd* cost_diagonal,
                                         double mu);

/// Three layers over three classes where layer t is informative of class t
/// only: W^{(t)} is p_in within C_t and within its complement, p_out across.
std::vector<Eigen::MatrixXd> expected_info3_layers(double p_in, double p_out,
                                                   index_t cluster_size);
MultilayerGraph sample_info3(double p_in, double p_out, index_t cluster_size,
                             std::uint64_t seed);

struct LabelBudget {
  std::vector<index_t> counts;  // per class; empty means use fraction
  double fraction = -1.0;

  index_t resolve(int cls, index_t cluster_size) const;
};

/// Uniform without replacement within each class; deterministic per seed.
std::vector<char> sample_labels(const std::vector<int>& truth,
                                const LabelBudget& budget, int num_classes,
                                std::uint64_t seed);

}  // namespace mlssl

#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <vector>

#include "mlssl/graph.hpp"
#include "mlssl/krylov.hpp"

namespace mlssl {

constexpr double kPlusInf = std::numeric_limits<double>::infinity();
constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

/// Scalar power mean ((1/T) sum x_i^p)^{1/p}. p = 0 is the geometric mean,
/// p = -inf / +inf the min / max. Entries must be positive for p <= 0 and
/// nonnegative otherwise.
double scalar_power_mean(const std::vector<double>& xs, double p);

/// A^p of a symmetric PSD matrix by eigendecomposition. Eigenvalues below
/// -1e-10 are rejected; values in (-1e-10, 1e-14) are raised to 1e-14 before
/// negative powers.
Eigen::MatrixXd dense_matrix_power(const Eigen::MatrixXd& a, double p);

Eigen::MatrixXd dense_normalized_laplacian(
    const SparseMatrix& w, IsolatedNodePolicy policy = IsolatedNodePolicy::Error);

/// ((1/T) sum (L_sym^{(t)} + eps I)^p)^{1/p} with eps = shift_for_p(p).
/// p = 0 takes the log-Euclidean limit exp((1/T) sum log(.)); p = +-inf is
/// accepted only when the shifted Laplacians commute.
Eigen::MatrixXd dense_power_mean_laplacian(
    const MultilayerGraph& graph, double p,
    IsolatedNodePolicy policy = IsolatedNodePolicy::Error);

Eigen::MatrixXd dense_power_mean_of(const std::vector<Eigen::MatrixXd>& shifted,
                                    double p);

struct LabelingProblem {
  Eigen::MatrixXd y;               // n x k, one-hot rows for labeled nodes
  std::vector<char> labeled_mask;  // length n
  double lambda = 1.0;
  double p = 1.0;
  std::optional<Eigen::VectorXd> cost_diagonal;  // per-node positive weights

  index_t n() const { return static_cast<index_t>(y.rows()); }
  index_t num_classes() const { return static_cast<index_t>(y.cols()); }
  void validate() const;
};

/// One-hot Y from ground truth restricted to the labeled mask. With
/// weighted_loss the cost diagonal is n/n_r on nodes labeled class r.
LabelingProblem make_labeling_problem(const std::vector<int>& truth,
                                      const std::vector<char>& labeled_mask,
                                      int num_classes, double lambda, double p,
                                      bool weighted_loss = false);

struct LabelingResult {
  Eigen::MatrixXd f;
  std::vector<int> predicted_labels;
  std::optional<double> test_error;
  std::vector<SolveReport> class_reports;
};

/// Per class r solves (I + lambda L_p) f = C y^{(r)} by dense Cholesky,
/// assembles F, labels by row argmax, and scores against the truth when given.
LabelingResult dense_ssl_solve(const Eigen::MatrixXd& l_p,
                               const LabelingProblem& problem,
                               const std::vector<int>* truth = nullptr);

/// Convenience: dense pipeline from the multilayer graph.
LabelingResult solve_ssl_dense(const MultilayerGraph& graph,
                               const LabelingProblem& problem,
                               const std::vector<int>* truth = nullptr,
                               IsolatedNodePolicy policy = IsolatedNodePolicy::Error);

// Row argmax with ties to the lowest class index.
std::vector<int> assign_labels(const Eigen::MatrixXd& f);

// Fraction of unlabeled nodes whose prediction differs from the truth.
double test_error(const std::vector<int>& predicted,
                  const std::vector<int>& truth,
                  const std::vector<char>& labeled_mask);

}  // namespace mlssl

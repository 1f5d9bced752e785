#include "mlssl/powermean.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlssl {

double scalar_power_mean(const std::vector<double>& xs, double p) {
  if (xs.empty())
    throw std::domain_error("scalar_power_mean: empty input");
  for (double x : xs) {
    if (!(x >= 0.0))
      throw std::domain_error("scalar_power_mean: negative entry");
    if (x == 0.0 && p <= 0.0)
      throw std::domain_error("scalar_power_mean: zero entry with p <= 0");
  }
  const double t = static_cast<double>(xs.size());
  if (p == kPlusInf) return *std::max_element(xs.begin(), xs.end());
  if (p == kMinusInf) return *std::min_element(xs.begin(), xs.end());
  if (p == 0.0) {
    double s = 0.0;
    for (double x : xs) s += std::log(x);
    return std::exp(s / t);
  }
  // scale by the dominant entry so x^p cannot overflow for large |p|
  double scale = p > 0.0 ? *std::max_element(xs.begin(), xs.end())
                         : *std::min_element(xs.begin(), xs.end());
  if (scale == 0.0) return 0.0;  // p > 0 with all zeros
  double s = 0.0;
  for (double x : xs) s += std::pow(x / scale, p);
  return scale * std::pow(s / t, 1.0 / p);
}

namespace {

Eigen::MatrixXd recompose(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                          const Eigen::VectorXd& mapped) {
  return es.eigenvectors() * mapped.asDiagonal() *
         es.eigenvectors().transpose();
}

Eigen::VectorXd clamped_eigenvalues(const Eigen::VectorXd& ev, double p) {
  Eigen::VectorXd out = ev;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out(i) < -1e-10)
      throw std::runtime_error(
          "dense_matrix_power: eigenvalue " + std::to_string(out(i)) +
          " below the -1e-10 clamp threshold");
    double floor_val = p < 0.0 ? 1e-14 : 0.0;
    if (out(i) < floor_val) out(i) = floor_val;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd dense_matrix_power(const Eigen::MatrixXd& a, double p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd ev = clamped_eigenvalues(es.eigenvalues(), p);
  Eigen::VectorXd mapped(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) mapped(i) = std::pow(ev(i), p);
  return recompose(es, mapped);
}

Eigen::MatrixXd dense_normalized_laplacian(const SparseMatrix& w,
                                           IsolatedNodePolicy policy) {
  SparseMatrix l = normalized_laplacian(w, policy);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(l.n_rows, l.n_cols);
  for (index_t r = 0; r < l.n_rows; ++r)
    for (index_t k = l.row_ptr[r]; k < l.row_ptr[r + 1]; ++k)
      out(r, l.col_idx[k]) = l.values[k];
  return out;
}

namespace {

// Joint eigenbasis for commuting symmetric matrices: eigenvectors of a
// generic positive combination separate any eigenspaces not shared by all.
Eigen::MatrixXd minmax_power_mean(const std::vector<Eigen::MatrixXd>& mats,
                                  bool want_max) {
  const Eigen::Index n = mats[0].rows();
  double scale = 0.0;
  for (const auto& m : mats) scale = std::max(scale, m.norm());
  if (scale == 0.0) scale = 1.0;
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (std::size_t j = i + 1; j < mats.size(); ++j) {
      double comm = (mats[i] * mats[j] - mats[j] * mats[i]).norm();
      if (comm > 1e-10 * scale * scale)
        throw std::invalid_argument(
            "dense_power_mean_laplacian: p = +-inf requires commuting "
            "layers (commutator norm " +
            std::to_string(comm) + ")");
    }
  Eigen::MatrixXd combo = Eigen::MatrixXd::Zero(n, n);
  double w = 1.0;
  for (const auto& m : mats) {
    combo += w * m;
    w *= 0.6180339887498949;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(combo);
  const Eigen::MatrixXd& u = es.eigenvectors();
  Eigen::VectorXd extreme(n);
  extreme.setConstant(want_max ? -kPlusInf : kPlusInf);
  for (const auto& m : mats) {
    Eigen::VectorXd diag = (u.transpose() * m * u).diagonal();
    for (Eigen::Index i = 0; i < n; ++i)
      extreme(i) = want_max ? std::max(extreme(i), diag(i))
                            : std::min(extreme(i), diag(i));
  }
  return u * extreme.asDiagonal() * u.transpose();
}

}  // namespace

Eigen::MatrixXd dense_power_mean_of(const std::vector<Eigen::MatrixXd>& shifted,
                                    double p) {
  if (shifted.empty())
    throw std::invalid_argument("dense_power_mean_of: no layers");
  const double t = static_cast<double>(shifted.size());
  const Eigen::Index n = shifted[0].rows();
  if (p == kPlusInf || p == kMinusInf)
    return minmax_power_mean(shifted, p == kPlusInf);
  if (p == 0.0) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (const auto& a : shifted) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
      Eigen::VectorXd ev = clamped_eigenvalues(es.eigenvalues(), -1.0);
      Eigen::VectorXd lg(ev.size());
      for (Eigen::Index i = 0; i < ev.size(); ++i) lg(i) = std::log(ev(i));
      acc += recompose(es, lg);
    }
    acc /= t;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(acc);
    Eigen::VectorXd ex(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < ex.size(); ++i)
      ex(i) = std::exp(es.eigenvalues()(i));
    return recompose(es, ex);
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (const auto& a : shifted) acc += dense_matrix_power(a, p);
  acc /= t;
  return dense_matrix_power(acc, 1.0 / p);
}

Eigen::MatrixXd dense_power_mean_laplacian(const MultilayerGraph& graph,
                                           double p,
                                           IsolatedNodePolicy policy) {
  double eps = shift_for_p(p);
  std::vector<Eigen::MatrixXd> shifted;
  shifted.reserve(graph.layers.size());
  for (const SparseMatrix& w : graph.layers) {
    Eigen::MatrixXd l = dense_normalized_laplacian(w, policy);
    l.diagonal().array() += eps;
    shifted.push_back(std::move(l));
  }
  return dense_power_mean_of(shifted, p);
}

void LabelingProblem::validate() const {
  if (static_cast<index_t>(labeled_mask.size()) != n())
    throw std::invalid_argument("LabelingProblem: mask length mismatch");
  if (!(lambda > 0.0))
    throw std::invalid_argument("LabelingProblem: lambda must be > 0");
  for (index_t i = 0; i < n(); ++i) {
    double row_sum = y.row(i).sum();
    double row_max = y.row(i).maxCoeff();
    double row_min = y.row(i).minCoeff();
    if (row_min < 0.0 || (row_max != 0.0 && row_max != 1.0))
      throw std::invalid_argument("LabelingProblem: Y entries must be 0/1");
    if (labeled_mask[static_cast<std::size_t>(i)]) {
      if (row_sum != 1.0)
        throw std::invalid_argument(
            "LabelingProblem: labeled node " + std::to_string(i) +
            " must have exactly one 1 in its Y row");
    } else if (row_sum != 0.0) {
      throw std::invalid_argument("LabelingProblem: unlabeled node " +
                                  std::to_string(i) + " has a nonzero Y row");
    }
  }
  if (cost_diagonal) {
    if (cost_diagonal->size() != n())
      throw std::invalid_argument("LabelingProblem: cost diagonal length");
    for (index_t i = 0; i < n(); ++i)
      if (labeled_mask[static_cast<std::size_t>(i)] && !((*cost_diagonal)(i) > 0.0))
        throw std::invalid_argument(
            "LabelingProblem: nonpositive cost on labeled node " +
            std::to_string(i));
  }
}

LabelingProblem make_labeling_problem(const std::vector<int>& truth,
                                      const std::vector<char>& labeled_mask,
                                      int num_classes, double lambda, double p,
                                      bool weighted_loss) {
  const index_t n = static_cast<index_t>(truth.size());
  LabelingProblem prob;
  prob.y = Eigen::MatrixXd::Zero(n, num_classes);
  prob.labeled_mask = labeled_mask;
  prob.lambda = lambda;
  prob.p = p;
  std::vector<index_t> per_class(static_cast<std::size_t>(num_classes), 0);
  for (index_t i = 0; i < n; ++i) {
    if (!labeled_mask[static_cast<std::size_t>(i)]) continue;
    int c = truth[static_cast<std::size_t>(i)];
    if (c < 0 || c >= num_classes)
      throw std::invalid_argument("make_labeling_problem: class out of range");
    prob.y(i, c) = 1.0;
    per_class[static_cast<std::size_t>(c)]++;
  }
  if (weighted_loss) {
    Eigen::VectorXd cost = Eigen::VectorXd::Ones(n);
    for (index_t i = 0; i < n; ++i) {
      if (!labeled_mask[static_cast<std::size_t>(i)]) continue;
      index_t nr = per_class[static_cast<std::size_t>(
          truth[static_cast<std::size_t>(i)])];
      if (nr == 0)
        throw std::invalid_argument(
            "make_labeling_problem: weighted loss with an unlabeled class");
      cost(i) = static_cast<double>(n) / static_cast<double>(nr);
    }
    prob.cost_diagonal = cost;
  }
  return prob;
}

LabelingResult dense_ssl_solve(const Eigen::MatrixXd& l_p,
                               const LabelingProblem& problem,
                               const std::vector<int>* truth) {
  problem.validate();
  const index_t n = problem.n();
  if (l_p.rows() != n || l_p.cols() != n)
    throw std::invalid_argument("dense_ssl_solve: L_p dimension mismatch");
  Eigen::MatrixXd system =
      problem.lambda * l_p + Eigen::MatrixXd::Identity(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("dense_ssl_solve: system not positive definite");

  Eigen::MatrixXd rhs = problem.y;
  if (problem.cost_diagonal)
    rhs = problem.cost_diagonal->asDiagonal() * rhs;

  LabelingResult res;
  res.f = llt.solve(rhs);
  for (index_t r = 0; r < problem.num_classes(); ++r) {
    SolveReport rep;
    rep.iterations = 1;
    double bn = rhs.col(r).norm();
    rep.final_residual_norm = (system * res.f.col(r) - rhs.col(r)).norm();
    rep.converged = bn == 0.0 || rep.final_residual_norm <= 1e-10 * bn;
    res.class_reports.push_back(rep);
  }
  res.predicted_labels = assign_labels(res.f);
  if (truth)
    res.test_error =
        test_error(res.predicted_labels, *truth, problem.labeled_mask);
  return res;
}

LabelingResult solve_ssl_dense(const MultilayerGraph& graph,
                               const LabelingProblem& problem,
                               const std::vector<int>* truth,
                               IsolatedNodePolicy policy) {
  return dense_ssl_solve(dense_power_mean_laplacian(graph, problem.p, policy),
                         problem, truth);
}

std::vector<int> assign_labels(const Eigen::MatrixXd& f) {
  if (!f.allFinite())
    throw std::runtime_error("assign_labels: non-finite solution matrix");
  std::vector<int> out(static_cast<std::size_t>(f.rows()));
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    int best = 0;
    for (Eigen::Index c = 1; c < f.cols(); ++c)
      if (f(i, c) > f(i, best)) best = static_cast<int>(c);
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

double test_error(const std::vector<int>& predicted,
                  const std::vector<int>& truth,
                  const std::vector<char>& labeled_mask) {
  if (predicted.size() != truth.size() ||
      predicted.size() != labeled_mask.size())
    throw std::invalid_argument("test_error: length mismatch");
  index_t unlabeled = 0, wrong = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (labeled_mask[i]) continue;
    unlabeled++;
    if (predicted[i] != truth[i]) wrong++;
  }
  if (unlabeled == 0)
    throw std::invalid_argument("test_error: no unlabeled nodes");
  return static_cast<double>(wrong) / static_cast<double>(unlabeled);
}

}  // namespace mlssl

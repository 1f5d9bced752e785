#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "mlssl/sparse.hpp"

namespace mlssl {

/// Matrix-free symmetric (or general, for GMRES) real operator.
struct RealOperator {
  index_t dim = 0;
  std::function<void(const std::vector<double>&, std::vector<double>&)> apply;
};

/// Matrix-free complex operator on split re/im vectors.
struct ComplexOperator {
  index_t dim = 0;
  std::function<void(const ComplexVector&, ComplexVector&)> apply;
};

struct SolveReport {
  index_t iterations = 0;
  double final_residual_norm = 0.0;
  bool converged = false;
  index_t matvec_count = 0;
};

/// Threshold incomplete Cholesky factor A ~= L L^T with L lower triangular.
/// Both L and L^T are kept in CSR so the two triangular sweeps stream rows.
struct IncompleteCholeskyFactor {
  SparseMatrix lower;
  SparseMatrix lower_t;
  double drop_tolerance = 0.0;

  // x <- (L L^T)^{-1} x
  void solve_inplace(std::vector<double>& x) const;
  std::vector<double> solve(const std::vector<double>& b) const;
};

/// Entries of the working column with magnitude below drop_tol times the
/// 2-norm of the corresponding column of A are discarded; drop_tol = 0
/// reproduces the exact factor. Throws on a nonpositive pivot.
IncompleteCholeskyFactor incomplete_cholesky(const SparseMatrix& a,
                                             double drop_tol);

using IterationCallback = std::function<void(index_t, double)>;

std::pair<std::vector<double>, SolveReport> pcg_solve(
    const RealOperator& op, const IncompleteCholeskyFactor* precond,
    const std::vector<double>& b, double tol, index_t max_iter,
    const IterationCallback& on_iteration = nullptr);

std::pair<std::vector<double>, SolveReport> gmres_solve(
    const RealOperator& op, const std::vector<double>& b, double tol,
    index_t restart, index_t max_iter,
    const IterationCallback& on_iteration = nullptr);

std::pair<ComplexVector, SolveReport> gmres_solve_complex(
    const ComplexOperator& op, const ComplexVector& b, double tol,
    index_t restart, index_t max_iter,
    const IterationCallback& on_iteration = nullptr);

enum class Extreme { Max, Min };

/// Ritz estimate of an extreme eigenvalue of a symmetric operator; full
/// reorthogonalization, deterministic seeded start vector. iters is clamped
/// to the operator dimension.
double lanczos_extreme(const RealOperator& op, Extreme which, index_t iters,
                       std::uint64_t seed);

// The operator borrows the matrix; the caller keeps it alive.
RealOperator make_operator(const SparseMatrix& a);
RealOperator make_shifted_operator(const SparseMatrix& a, double shift);

}  // namespace mlssl

#include "mlssl/krylov.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

namespace mlssl {

namespace {

double canonical_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void IncompleteCholeskyFactor::solve_inplace(std::vector<double>& x) const {
  const index_t n = lower.n_rows;
  // forward: L y = x (diagonal is the last entry of each row)
  for (index_t i = 0; i < n; ++i) {
    double s = x[static_cast<std::size_t>(i)];
    index_t last = lower.row_ptr[i + 1] - 1;
    for (index_t k = lower.row_ptr[i]; k < last; ++k)
      s -= lower.values[k] * x[static_cast<std::size_t>(lower.col_idx[k])];
    x[static_cast<std::size_t>(i)] = s / lower.values[last];
  }
  // backward: L^T z = y (diagonal is the first entry of each row of L^T)
  for (index_t i = n - 1; i >= 0; --i) {
    double s = x[static_cast<std::size_t>(i)];
    index_t first = lower_t.row_ptr[i];
    for (index_t k = first + 1; k < lower_t.row_ptr[i + 1]; ++k)
      s -= lower_t.values[k] * x[static_cast<std::size_t>(lower_t.col_idx[k])];
    x[static_cast<std::size_t>(i)] = s / lower_t.values[first];
  }
}

std::vector<double> IncompleteCholeskyFactor::solve(
    const std::vector<double>& b) const {
  std::vector<double> x = b;
  solve_inplace(x);
  return x;
}

IncompleteCholeskyFactor incomplete_cholesky(const SparseMatrix& a,
                                             double drop_tol) {
  if (a.n_rows != a.n_cols)
    throw std::invalid_argument("incomplete_cholesky: matrix not square");
  if (drop_tol < 0.0)
    throw std::invalid_argument("incomplete_cholesky: negative drop_tol");
  const index_t n = a.n_rows;
  std::vector<double> colnorm(static_cast<std::size_t>(n));
  for (index_t j = 0; j < n; ++j) colnorm[j] = a.row_norm2(j);

  // Left-looking column factorization. Columns already factored are chained
  // by the row index of their next unconsumed entry.
  std::vector<std::vector<std::int32_t>> col_rows(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> col_vals(static_cast<std::size_t>(n));
  std::vector<std::size_t> cursor(static_cast<std::size_t>(n), 0);
  std::vector<index_t> chain_head(static_cast<std::size_t>(n), -1);
  std::vector<index_t> chain_next(static_cast<std::size_t>(n), -1);

  std::vector<double> work(static_cast<std::size_t>(n), 0.0);
  std::vector<char> marked(static_cast<std::size_t>(n), 0);
  std::vector<std::int32_t> pattern;

  auto touch = [&](std::int32_t row) {
    if (!marked[static_cast<std::size_t>(row)]) {
      marked[static_cast<std::size_t>(row)] = 1;
      pattern.push_back(row);
    }
  };

  index_t total_nnz = 0;
  for (index_t j = 0; j < n; ++j) {
    pattern.clear();
    // scatter the lower part of column j of A (row j, cols >= j by symmetry)
    for (index_t k = a.row_ptr[j]; k < a.row_ptr[j + 1]; ++k) {
      std::int32_t c = a.col_idx[k];
      if (c < j) continue;
      work[static_cast<std::size_t>(c)] += a.values[k];
      touch(c);
    }
    // apply updates from every earlier column with an entry in row j
    for (index_t k = chain_head[static_cast<std::size_t>(j)]; k != -1;) {
      index_t next = chain_next[static_cast<std::size_t>(k)];
      const auto& rows = col_rows[static_cast<std::size_t>(k)];
      const auto& vals = col_vals[static_cast<std::size_t>(k)];
      std::size_t cur = cursor[static_cast<std::size_t>(k)];
      double ljk = vals[cur];
      for (std::size_t q = cur; q < rows.size(); ++q) {
        work[static_cast<std::size_t>(rows[q])] -= ljk * vals[q];
        touch(rows[q]);
      }
      cursor[static_cast<std::size_t>(k)] = ++cur;
      if (cur < rows.size()) {
        index_t r2 = rows[cur];
        chain_next[static_cast<std::size_t>(k)] = chain_head[r2];
        chain_head[r2] = k;
      }
      k = next;
    }
    double pivot = work[static_cast<std::size_t>(j)];
    if (!(pivot > 0.0)) {
      for (std::int32_t r : pattern) {
        work[static_cast<std::size_t>(r)] = 0.0;
        marked[static_cast<std::size_t>(r)] = 0;
      }
      throw std::runtime_error(
          "incomplete_cholesky: nonpositive pivot at column " +
          std::to_string(j) +
          " (matrix not SPD or drop_tol too aggressive; retry with a "
          "diagonal boost)");
    }
    double diag = std::sqrt(pivot);
    std::sort(pattern.begin(), pattern.end());
    auto& rows = col_rows[static_cast<std::size_t>(j)];
    auto& vals = col_vals[static_cast<std::size_t>(j)];
    rows.push_back(static_cast<std::int32_t>(j));
    vals.push_back(diag);
    double threshold = drop_tol * colnorm[static_cast<std::size_t>(j)];
    for (std::int32_t r : pattern) {
      if (r > j) {
        double w = work[static_cast<std::size_t>(r)];
        if (std::abs(w) >= threshold && w != 0.0) {
          rows.push_back(r);
          vals.push_back(w / diag);
        }
      }
      work[static_cast<std::size_t>(r)] = 0.0;
      marked[static_cast<std::size_t>(r)] = 0;
    }
    total_nnz += static_cast<index_t>(rows.size());
    cursor[static_cast<std::size_t>(j)] = 1;
    if (rows.size() > 1) {
      index_t r2 = rows[1];
      chain_next[static_cast<std::size_t>(j)] = chain_head[r2];
      chain_head[r2] = static_cast<index_t>(j);
    }
  }

  // columns of L are rows of L^T
  IncompleteCholeskyFactor f;
  f.drop_tolerance = drop_tol;
  f.lower_t.n_rows = n;
  f.lower_t.n_cols = n;
  f.lower_t.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  f.lower_t.col_idx.reserve(static_cast<std::size_t>(total_nnz));
  f.lower_t.values.reserve(static_cast<std::size_t>(total_nnz));
  for (index_t j = 0; j < n; ++j) {
    const auto& rows = col_rows[static_cast<std::size_t>(j)];
    const auto& vals = col_vals[static_cast<std::size_t>(j)];
    f.lower_t.col_idx.insert(f.lower_t.col_idx.end(), rows.begin(), rows.end());
    f.lower_t.values.insert(f.lower_t.values.end(), vals.begin(), vals.end());
    f.lower_t.row_ptr[j + 1] =
        f.lower_t.row_ptr[j] + static_cast<index_t>(rows.size());
  }
  f.lower = f.lower_t.transposed();
  return f;
}

std::pair<std::vector<double>, SolveReport> pcg_solve(
    const RealOperator& op, const IncompleteCholeskyFactor* precond,
    const std::vector<double>& b, double tol, index_t max_iter,
    const IterationCallback& on_iteration) {
  if (static_cast<index_t>(b.size()) != op.dim)
    throw std::invalid_argument("pcg_solve: dimension mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("pcg_solve: tol must be > 0");
  const std::size_t n = b.size();
  SolveReport rep;
  std::vector<double> x(n, 0.0);
  std::vector<double> r = b;
  double bnorm = norm2(b);
  if (bnorm == 0.0) {
    rep.converged = true;
    return {x, rep};
  }
  std::vector<double> z = precond ? precond->solve(r) : r;
  std::vector<double> p = z;
  std::vector<double> q(n);
  double rz = dot(r, z);
  double rnorm = norm2(r);
  for (index_t it = 0; it < max_iter; ++it) {
    if (rnorm <= tol * bnorm) break;
    op.apply(p, q);
    rep.matvec_count++;
    double pq = dot(p, q);
    if (!(pq > 0.0))
      throw std::runtime_error(
          "pcg_solve: operator not positive definite (p'Ap <= 0)");
    double alpha = rz / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    rnorm = norm2(r);
    rep.iterations++;
    if (on_iteration) on_iteration(rep.iterations, rnorm);
    if (rnorm <= tol * bnorm) break;
    if (precond) {
      z = precond->solve(r);
    } else {
      z = r;
    }
    double rz_new = dot(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.final_residual_norm = rnorm;
  rep.converged = rnorm <= tol * bnorm;
  return {x, rep};
}

namespace {

template <typename Scalar>
struct GmresVecOps;

template <>
struct GmresVecOps<double> {
  static double conj(double v) { return v; }
  static double abs2(double v) { return v * v; }
};

template <>
struct GmresVecOps<std::complex<double>> {
  static std::complex<double> conj(std::complex<double> v) {
    return std::conj(v);
  }
  static double abs2(std::complex<double> v) { return std::norm(v); }
};

template <typename Scalar>
std::pair<std::vector<Scalar>, SolveReport> gmres_impl(
    index_t dim,
    const std::function<void(const std::vector<Scalar>&, std::vector<Scalar>&)>&
        apply,
    const std::vector<Scalar>& b, double tol, index_t restart,
    index_t max_iter, const IterationCallback& on_iteration) {
  using Ops = GmresVecOps<Scalar>;
  if (static_cast<index_t>(b.size()) != dim)
    throw std::invalid_argument("gmres_solve: dimension mismatch");
  if (restart < 1) throw std::invalid_argument("gmres_solve: restart >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("gmres_solve: tol must be > 0");

  const std::size_t n = b.size();
  auto vnorm = [](const std::vector<Scalar>& v) {
    double s = 0.0;
    for (const Scalar& e : v) s += Ops::abs2(e);
    return std::sqrt(s);
  };
  auto vdot = [](const std::vector<Scalar>& a, const std::vector<Scalar>& c) {
    Scalar s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += Ops::conj(a[i]) * c[i];
    return s;
  };

  SolveReport rep;
  std::vector<Scalar> x(n, Scalar{});
  double bnorm = vnorm(b);
  if (bnorm == 0.0) {
    rep.converged = true;
    return {x, rep};
  }
  const index_t m = restart;
  std::vector<std::vector<Scalar>> basis;
  std::vector<Scalar> hess(static_cast<std::size_t>((m + 1) * m), Scalar{});
  std::vector<Scalar> cs(static_cast<std::size_t>(m));
  std::vector<Scalar> sn(static_cast<std::size_t>(m));
  std::vector<Scalar> g(static_cast<std::size_t>(m) + 1);
  std::vector<Scalar> w(n);
  auto h = [&](index_t i, index_t j) -> Scalar& {
    return hess[static_cast<std::size_t>(i * m + j)];
  };

  double resid = bnorm;
  index_t total_it = 0;
  while (total_it < max_iter) {
    // residual for this cycle
    std::vector<Scalar> r(n);
    apply(x, r);
    rep.matvec_count++;
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    double beta = vnorm(r);
    resid = beta;
    if (beta <= tol * bnorm) break;
    basis.assign(1, r);
    for (Scalar& e : basis[0]) e = e * Scalar(1.0 / beta);
    std::fill(g.begin(), g.end(), Scalar{});
    g[0] = Scalar(beta);
    index_t j = 0;
    bool breakdown = false;
    for (; j < m && total_it < max_iter; ++j, ++total_it) {
      apply(basis[static_cast<std::size_t>(j)], w);
      rep.matvec_count++;
      for (index_t i = 0; i <= j; ++i) {
        Scalar hij = vdot(basis[static_cast<std::size_t>(i)], w);
        h(i, j) = hij;
        const auto& vi = basis[static_cast<std::size_t>(i)];
        for (std::size_t q = 0; q < n; ++q) w[q] -= hij * vi[q];
      }
      double wn = vnorm(w);
      h(j + 1, j) = Scalar(wn);
      if (wn > 1e-14 * bnorm) {
        std::vector<Scalar> v = w;
        for (Scalar& e : v) e = e * Scalar(1.0 / wn);
        basis.push_back(std::move(v));
      } else {
        breakdown = true;
      }
      // previously accumulated rotations
      for (index_t i = 0; i < j; ++i) {
        Scalar t = cs[static_cast<std::size_t>(i)] * h(i, j) +
                   sn[static_cast<std::size_t>(i)] * h(i + 1, j);
        h(i + 1, j) = -Ops::conj(sn[static_cast<std::size_t>(i)]) * h(i, j) +
                      Ops::conj(cs[static_cast<std::size_t>(i)]) * h(i + 1, j);
        h(i, j) = t;
      }
      // new rotation zeroing h(j+1, j); convention [c s; -conj(s) conj(c)]
      // with c = conj(a)/denom, s = conj(b)/denom makes the diagonal real
      double a2 = Ops::abs2(h(j, j));
      double b2 = Ops::abs2(h(j + 1, j));
      double denom = std::sqrt(a2 + b2);
      if (denom == 0.0) {
        cs[static_cast<std::size_t>(j)] = Scalar(1.0);
        sn[static_cast<std::size_t>(j)] = Scalar{};
      } else {
        cs[static_cast<std::size_t>(j)] =
            Ops::conj(h(j, j)) * Scalar(1.0 / denom);
        sn[static_cast<std::size_t>(j)] =
            Ops::conj(h(j + 1, j)) * Scalar(1.0 / denom);
      }
      h(j, j) = Scalar(denom);
      h(j + 1, j) = Scalar{};
      Scalar gj = g[static_cast<std::size_t>(j)];
      g[static_cast<std::size_t>(j)] = cs[static_cast<std::size_t>(j)] * gj;
      g[static_cast<std::size_t>(j + 1)] =
          -Ops::conj(sn[static_cast<std::size_t>(j)]) * gj;
      resid = std::sqrt(Ops::abs2(g[static_cast<std::size_t>(j + 1)]));
      rep.iterations = total_it + 1;
      if (on_iteration) on_iteration(rep.iterations, resid);
      if (resid <= tol * bnorm || breakdown) {
        ++j;
        ++total_it;
        break;
      }
    }
    // back-substitute y and update x
    index_t used = j;
    if (used > 0) {
      std::vector<Scalar> y(static_cast<std::size_t>(used));
      for (index_t i = used - 1; i >= 0; --i) {
        Scalar s = g[static_cast<std::size_t>(i)];
        for (index_t q = i + 1; q < used; ++q)
          s -= h(i, q) * y[static_cast<std::size_t>(q)];
        y[static_cast<std::size_t>(i)] = s / h(i, i);
      }
      for (index_t i = 0; i < used; ++i) {
        const auto& vi = basis[static_cast<std::size_t>(i)];
        Scalar yi = y[static_cast<std::size_t>(i)];
        for (std::size_t q = 0; q < n; ++q) x[q] += yi * vi[q];
      }
    }
    if (breakdown) {
      if (resid > tol * bnorm)
        throw std::runtime_error(
            "gmres_solve: Hessenberg breakdown with nonzero residual");
      break;
    }
    if (resid <= tol * bnorm) break;
  }
  // true residual for the report
  std::vector<Scalar> r(n);
  apply(x, r);
  rep.matvec_count++;
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  rep.final_residual_norm = vnorm(r);
  rep.converged = rep.final_residual_norm <= tol * bnorm;
  return {x, rep};
}

}  // namespace

std::pair<std::vector<double>, SolveReport> gmres_solve(
    const RealOperator& op, const std::vector<double>& b, double tol,
    index_t restart, index_t max_iter, const IterationCallback& on_iteration) {
  std::function<void(const std::vector<double>&, std::vector<double>&)> apply =
      [&op](const std::vector<double>& in, std::vector<double>& out) {
        op.apply(in, out);
      };
  return gmres_impl<double>(op.dim, apply, b, tol, restart, max_iter,
                            on_iteration);
}

std::pair<ComplexVector, SolveReport> gmres_solve_complex(
    const ComplexOperator& op, const ComplexVector& b, double tol,
    index_t restart, index_t max_iter, const IterationCallback& on_iteration) {
  using C = std::complex<double>;
  const std::size_t n = b.size();
  ComplexVector tmp_in(n), tmp_out(n);
  std::function<void(const std::vector<C>&, std::vector<C>&)> apply =
      [&](const std::vector<C>& in, std::vector<C>& out) {
        for (std::size_t i = 0; i < n; ++i) {
          tmp_in.re[i] = in[i].real();
          tmp_in.im[i] = in[i].imag();
        }
        op.apply(tmp_in, tmp_out);
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = C(tmp_out.re[i], tmp_out.im[i]);
      };
  std::vector<C> bc(n);
  for (std::size_t i = 0; i < n; ++i) bc[i] = C(b.re[i], b.im[i]);
  auto [xc, rep] =
      gmres_impl<C>(op.dim, apply, bc, tol, restart, max_iter, on_iteration);
  ComplexVector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x.re[i] = xc[i].real();
    x.im[i] = xc[i].imag();
  }
  return {std::move(x), rep};
}

double lanczos_extreme(const RealOperator& op, Extreme which, index_t iters,
                       std::uint64_t seed) {
  const index_t n = op.dim;
  if (n == 0) throw std::invalid_argument("lanczos_extreme: empty operator");
  index_t m = std::min<index_t>(iters, n);
  if (m < 1) m = 1;

  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> basis;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& e : v) e = 2.0 * canonical_uniform(rng) - 1.0;
  double nv = norm2(v);
  for (double& e : v) e /= nv;
  basis.push_back(v);

  std::vector<double> alpha, beta;
  std::vector<double> w(static_cast<std::size_t>(n));
  for (index_t j = 0; j < m; ++j) {
    op.apply(basis[static_cast<std::size_t>(j)], w);
    double a = dot(w, basis[static_cast<std::size_t>(j)]);
    alpha.push_back(a);
    // full reorthogonalization, two passes
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) axpy(-dot(w, q), q, w);
    double b = norm2(w);
    if (j + 1 == m || b < 1e-13) break;
    beta.push_back(b);
    for (double& e : w) e /= b;
    basis.push_back(w);
  }
  const index_t k = static_cast<index_t>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
  for (index_t i = 0; i < k; ++i) {
    t(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < k) {
      t(i, i + 1) = beta[static_cast<std::size_t>(i)];
      t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  const auto& ev = es.eigenvalues();
  return which == Extreme::Max ? ev(k - 1) : ev(0);
}

RealOperator make_operator(const SparseMatrix& a) {
  return RealOperator{a.n_rows,
                      [&a](const std::vector<double>& x,
                           std::vector<double>& y) { spmv(a, x, y); }};
}

RealOperator make_shifted_operator(const SparseMatrix& a, double shift) {
  return RealOperator{a.n_rows, [&a, shift](const std::vector<double>& x,
                                            std::vector<double>& y) {
                        spmv(a, x, y);
                        for (std::size_t i = 0; i < x.size(); ++i)
                          y[i] += shift * x[i];
                      }};
}

}  // namespace mlssl

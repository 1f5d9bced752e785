#include <doctest.h>

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "mlssl/graph.hpp"
#include "mlssl/krylov.hpp"
#include "mlssl/msbm.hpp"

using namespace mlssl;

namespace {

SparseMatrix diag_matrix(const std::vector<double>& d) {
  std::vector<Triplet> trip;
  for (index_t i = 0; i < static_cast<index_t>(d.size()); ++i)
    trip.push_back({i, i, d[static_cast<std::size_t>(i)]});
  return csr_from_triplets(std::move(trip), static_cast<index_t>(d.size()),
                           static_cast<index_t>(d.size()));
}

Eigen::MatrixXd dense_of(const SparseMatrix& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.n_rows, a.n_cols);
  for (index_t r = 0; r < a.n_rows; ++r)
    for (index_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      m(r, a.col_idx[k]) = a.values[k];
  return m;
}

RealOperator dense_operator(const Eigen::MatrixXd& m) {
  return RealOperator{m.rows(), [&m](const std::vector<double>& x,
                                     std::vector<double>& y) {
                        Eigen::Map<const Eigen::VectorXd> xv(x.data(),
                                                             m.cols());
                        Eigen::VectorXd yv = m * xv;
                        y.assign(yv.data(), yv.data() + yv.size());
                      }};
}

// one SBM layer Laplacian plus a diagonal shift, as used by the inner solves
SparseMatrix shifted_sbm_laplacian(index_t cluster_size, double shift,
                                   std::uint64_t seed) {
  MsbmParams params;
  params.k = 2;
  params.cluster_size = cluster_size;
  params.layer_probs = {{0.09, 0.01}};
  MultilayerGraph g = sample_msbm(params, seed);
  SparseMatrix l = normalized_laplacian(g.layers[0]);
  std::vector<Triplet> trip;
  for (index_t r = 0; r < l.n_rows; ++r)
    for (index_t k = l.row_ptr[r]; k < l.row_ptr[r + 1]; ++k)
      trip.push_back({r, l.col_idx[k], l.values[k]});
  for (index_t r = 0; r < l.n_rows; ++r) trip.push_back({r, r, shift});
  return csr_from_triplets(std::move(trip), l.n_rows, l.n_cols);
}

}  // namespace

TEST_CASE("pcg on identity and diagonal systems") {
  SparseMatrix eye = csr_identity(4);
  std::vector<double> b = {1.0, -2.0, 0.5, 3.0};
  auto [x, rep] = pcg_solve(make_operator(eye), nullptr, b, 1e-12, 10);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 1);
  for (std::size_t i = 0; i < b.size(); ++i)
    CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-12));

  SparseMatrix d = diag_matrix({1.0, 2.0, 4.0});
  auto [xd, repd] =
      pcg_solve(make_operator(d), nullptr, {1.0, 2.0, 4.0}, 1e-12, 10);
  CHECK(repd.converged);
  for (double v : xd) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("pcg with incomplete Cholesky on a shifted SBM Laplacian") {
  SparseMatrix a = shifted_sbm_laplacian(50, 0.3, 42);  // 100 x 100
  IncompleteCholeskyFactor f = incomplete_cholesky(a, 1e-4);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> b(100);
  for (auto& v : b) v = u(rng);

  std::vector<double> residuals;
  auto [x, rep] = pcg_solve(make_operator(a), &f, b, 1e-8, 100,
                            [&](index_t, double r) { residuals.push_back(r); });
  CHECK(rep.converged);
  CHECK(rep.iterations <= 5);
  // residual norm nonincreasing on this system
  for (std::size_t i = 1; i < residuals.size(); ++i)
    CHECK(residuals[i] <= residuals[i - 1] * (1.0 + 1e-12));
  std::vector<double> ax = spmv(a, x);
  axpy(-1.0, b, ax);
  CHECK(norm2(ax) <= 1e-8 * norm2(b));
}

TEST_CASE("pcg reports indefiniteness") {
  SparseMatrix d = diag_matrix({1.0, -1.0});
  CHECK_THROWS_AS(pcg_solve(make_operator(d), nullptr, {0.0, 1.0}, 1e-10, 10),
                  std::runtime_error);
}

TEST_CASE("gmres on complex identity and scalar shift") {
  ComplexOperator ident{3, [](const ComplexVector& in, ComplexVector& out) {
                          out = in;
                        }};
  ComplexVector b(3);
  b.re = {1.0, 2.0, 3.0};
  b.im = {-1.0, 0.5, 0.0};
  auto [x, rep] = gmres_solve_complex(ident, b, 1e-12, 10, 100);
  CHECK(rep.converged);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(x.re[i] == doctest::Approx(b.re[i]).epsilon(1e-10));
    CHECK(x.im[i] == doctest::Approx(b.im[i]).epsilon(1e-10));
  }

  std::complex<double> shift(4.0, 3.0);
  ComplexOperator scaled{3, [shift](const ComplexVector& in, ComplexVector& out) {
                           out = ComplexVector(in.size());
                           for (std::size_t i = 0; i < in.size(); ++i) {
                             std::complex<double> v(in.re[i], in.im[i]);
                             std::complex<double> w = shift * v;
                             out.re[i] = w.real();
                             out.im[i] = w.imag();
                           }
                         }};
  ComplexVector ones(3);
  ones.re = {1.0, 1.0, 1.0};
  auto [y, rep2] = gmres_solve_complex(scaled, ones, 1e-12, 10, 100);
  CHECK(rep2.converged);
  std::complex<double> expect = 1.0 / shift;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(y.re[i] == doctest::Approx(expect.real()).epsilon(1e-10));
    CHECK(y.im[i] == doctest::Approx(expect.imag()).epsilon(1e-10));
  }
}

TEST_CASE("gmres matches a dense factorization on I + lambda L") {
  SparseMatrix a = shifted_sbm_laplacian(30, 0.0, 7);  // n = 60
  Eigen::MatrixXd sys =
      Eigen::MatrixXd::Identity(60, 60) + 2.5 * dense_of(a);
  std::vector<double> b(60, 0.0);
  b[3] = 1.0;  // indicator vector

  std::vector<double> residuals;
  auto [x, rep] =
      gmres_solve(dense_operator(sys), b, 1e-10, 50, 500,
                  [&](index_t, double r) { residuals.push_back(r); });
  CHECK(rep.converged);
  for (std::size_t i = 1; i < residuals.size(); ++i)
    CHECK(residuals[i] <= residuals[i - 1] * (1.0 + 1e-12));

  Eigen::VectorXd bv = Eigen::VectorXd::Zero(60);
  bv(3) = 1.0;
  Eigen::VectorXd ref = sys.ldlt().solve(bv);
  for (index_t i = 0; i < 60; ++i)
    CHECK(std::abs(x[static_cast<std::size_t>(i)] - ref(i)) <=
          1e-8 * (1.0 + std::abs(ref(i))));
}

TEST_CASE("gmres iteration count consistent with the condition-number rate") {
  // random SPD via A = Q D Q^T with a controlled spectrum
  std::mt19937 rng(13);
  const index_t n = 80;
  Eigen::MatrixXd g(n, n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < n; ++j) g(i, j) = u(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd d(n);
  for (index_t i = 0; i < n; ++i)
    d(i) = 1.0 + 9.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  Eigen::MatrixXd a = q * d.asDiagonal() * q.transpose();
  double kappa = 10.0;

  std::vector<double> b(n);
  for (auto& v : b) v = u(rng);
  double tol = 1e-8;
  auto [x, rep] = gmres_solve(dense_operator(a), b, tol, n, 1000);
  CHECK(rep.converged);
  double rate = (kappa * kappa - 1.0) / (kappa * kappa);
  double bound = 2.0 * std::log(tol) / std::log(rate);
  CHECK(static_cast<double>(rep.iterations) <= 3.0 * bound);
}

TEST_CASE("incomplete Cholesky on identity, diagonal, and zero drop") {
  IncompleteCholeskyFactor fi = incomplete_cholesky(csr_identity(5), 1e-4);
  CHECK(fi.lower.nnz() == 5);
  for (double v : fi.lower.values) CHECK(v == 1.0);

  IncompleteCholeskyFactor fd =
      incomplete_cholesky(diag_matrix({4.0, 9.0}), 0.0);
  CHECK(fd.lower.values[0] == doctest::Approx(2.0));
  CHECK(fd.lower.values[1] == doctest::Approx(3.0));

  SparseMatrix a = shifted_sbm_laplacian(25, 0.3, 99);  // n = 50
  IncompleteCholeskyFactor f0 = incomplete_cholesky(a, 0.0);
  Eigen::MatrixXd l = dense_of(f0.lower);
  Eigen::MatrixXd ad = dense_of(a);
  CHECK((l * l.transpose() - ad).norm() <= 1e-10 * ad.norm());

  // exact factor on a tridiagonal (fill-in free) matrix
  std::vector<Triplet> trid;
  for (index_t i = 0; i < 10; ++i) {
    trid.push_back({i, i, 2.5});
    if (i + 1 < 10) {
      trid.push_back({i, i + 1, -1.0});
      trid.push_back({i + 1, i, -1.0});
    }
  }
  SparseMatrix t = csr_from_triplets(std::move(trid), 10, 10);
  IncompleteCholeskyFactor ft = incomplete_cholesky(t, 0.0);
  Eigen::MatrixXd lt = dense_of(ft.lower);
  CHECK((lt * lt.transpose() - dense_of(t)).norm() <=
        1e-10 * dense_of(t).norm());

  CHECK_THROWS_AS(incomplete_cholesky(diag_matrix({1.0, -2.0}), 0.0),
                  std::runtime_error);
}

TEST_CASE("preconditioner solve inverts L L^T") {
  SparseMatrix a = shifted_sbm_laplacian(20, 0.3, 3);
  IncompleteCholeskyFactor f = incomplete_cholesky(a, 0.0);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> b(40);
  for (auto& v : b) v = u(rng);
  std::vector<double> x = f.solve(b);
  // with zero drop, L L^T = A, so A x = b
  std::vector<double> ax = spmv(a, x);
  axpy(-1.0, b, ax);
  CHECK(norm2(ax) <= 1e-9 * norm2(b));
}

TEST_CASE("lanczos extreme eigenvalues") {
  SparseMatrix d = diag_matrix({1.0, 2.0, 10.0});
  CHECK(lanczos_extreme(make_operator(d), Extreme::Max, 3, 1) ==
        doctest::Approx(10.0).epsilon(1e-8));

  SparseMatrix eye = csr_identity(20);
  CHECK(lanczos_extreme(make_operator(eye), Extreme::Max, 30, 2) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(lanczos_extreme(make_operator(eye), Extreme::Min, 30, 2) ==
        doctest::Approx(1.0).epsilon(1e-10));

  // expected-graph Laplacian, 200 nodes, against the dense eigensolver
  MsbmParams params;
  params.k = 2;
  params.cluster_size = 100;
  params.layer_probs = {{0.09, 0.01}};
  Eigen::MatrixXd w = expected_adjacency(params, 0);
  Eigen::VectorXd deg = w.rowwise().sum();
  Eigen::VectorXd dm(200);
  for (index_t i = 0; i < 200; ++i) dm(i) = 1.0 / std::sqrt(deg(i));
  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(200, 200) -
                        dm.asDiagonal() * w * dm.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  double dense_max = es.eigenvalues()(199);
  double ritz = lanczos_extreme(dense_operator(lap), Extreme::Max, 60, 4);
  CHECK(std::abs(ritz - dense_max) <= 1e-6 * std::abs(dense_max));
}

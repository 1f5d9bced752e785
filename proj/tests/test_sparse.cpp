#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>
#include <random>

#include "mlssl/sparse.hpp"

using namespace mlssl;

namespace {

Eigen::MatrixXd dense_of(const std::vector<Triplet>& trip, index_t rows,
                         index_t cols) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (const Triplet& t : trip) m(t.row, t.col) += t.value;
  return m;
}

Eigen::MatrixXd dense_of(const SparseMatrix& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.n_rows, a.n_cols);
  for (index_t r = 0; r < a.n_rows; ++r)
    for (index_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      m(r, a.col_idx[k]) = a.values[k];
  return m;
}

std::vector<Triplet> random_symmetric_triplets(index_t n, double density,
                                               std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Triplet> trip;
  for (index_t i = 0; i < n; ++i)
    for (index_t j = i; j < n; ++j)
      if (u(rng) < density) {
        double v = u(rng) * 2.0 - 1.0;
        trip.push_back({i, j, v});
        if (i != j) trip.push_back({j, i, v});
      }
  return trip;
}

}  // namespace

TEST_CASE("csr_from_triplets basics") {
  SparseMatrix a = csr_from_triplets({{0, 0, 1.0}}, 1, 1);
  CHECK(a.nnz() == 1);
  CHECK(a.values[0] == 1.0);

  SparseMatrix b = csr_from_triplets({{0, 1, 2.0}, {0, 1, 3.0}}, 2, 2);
  CHECK(b.nnz() == 1);
  CHECK(b.col_idx[0] == 1);
  CHECK(b.values[0] == 5.0);

  SparseMatrix c = csr_from_triplets({{1, 0, 4.0}, {0, 1, 4.0}}, 2, 2);
  CHECK(c.is_symmetric());
  Eigen::MatrixXd ref = dense_of({{1, 0, 4.0}, {0, 1, 4.0}}, 2, 2);
  CHECK((dense_of(c) - ref).norm() == 0.0);

  CHECK_THROWS_AS(csr_from_triplets({{0, 5, 1.0}}, 2, 2),
                  std::invalid_argument);
  // explicit zeros (and exact cancellations) are dropped
  SparseMatrix d = csr_from_triplets({{0, 0, 1.0}, {0, 0, -1.0}}, 1, 1);
  CHECK(d.nnz() == 0);
}

TEST_CASE("spmv identity, zero, and dense oracle") {
  SparseMatrix eye = csr_identity(3);
  std::vector<double> x = {1.0, 2.0, 3.0};
  CHECK(spmv(eye, x) == x);

  SparseMatrix zero = csr_from_triplets({}, 3, 3);
  std::vector<double> y = spmv(zero, x);
  for (double v : y) CHECK(v == 0.0);

  std::mt19937 rng(7);
  auto trip = random_symmetric_triplets(5, 0.7, rng);
  SparseMatrix a = csr_from_triplets(trip, 5, 5);
  Eigen::MatrixXd ad = dense_of(a);
  Eigen::VectorXd xv = Eigen::VectorXd::Random(5);
  std::vector<double> xs(xv.data(), xv.data() + 5);
  std::vector<double> ys = spmv(a, xs);
  Eigen::VectorXd yd = ad * xv;
  for (index_t i = 0; i < 5; ++i)
    CHECK(std::abs(ys[i] - yd(i)) <= 1e-14 * (1.0 + std::abs(yd(i))));

  CHECK_THROWS_AS(spmv(a, std::vector<double>(4, 0.0)), std::invalid_argument);
}

TEST_CASE("spmv_complex splits into components") {
  SparseMatrix eye = csr_identity(2);
  ComplexVector v(2);
  v.re = {1.0, 0.0};
  v.im = {2.0, -1.0};
  ComplexVector w = spmv_complex(eye, v);
  CHECK(w.re == v.re);
  CHECK(w.im == v.im);

  std::mt19937 rng(11);
  SparseMatrix a =
      csr_from_triplets(random_symmetric_triplets(6, 0.5, rng), 6, 6);
  ComplexVector z(6);
  for (std::size_t i = 0; i < 6; ++i) {
    z.re[i] = std::sin(1.0 + static_cast<double>(i));
    z.im[i] = std::cos(2.0 + static_cast<double>(i));
  }
  ComplexVector az = spmv_complex(a, z);
  CHECK(az.re == spmv(a, z.re));
  CHECK(az.im == spmv(a, z.im));

  ComplexVector pure_real(6);
  pure_real.re = z.re;
  ComplexVector apr = spmv_complex(a, pure_real);
  for (double v2 : apr.im) CHECK(v2 == 0.0);
}

TEST_CASE("symmetric bilinear identity and 50x50 dense agreement") {
  std::mt19937 rng(23);
  SparseMatrix a =
      csr_from_triplets(random_symmetric_triplets(50, 0.15, rng), 50, 50);
  REQUIRE(a.is_symmetric());
  Eigen::MatrixXd ad = dense_of(a);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(50), y(50);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    double xay = dot(x, spmv(a, y));
    double yax = dot(y, spmv(a, x));
    CHECK(std::abs(xay - yax) <= 1e-12 * (1.0 + std::abs(xay)));

    Eigen::VectorXd xv = Eigen::Map<Eigen::VectorXd>(x.data(), 50);
    Eigen::VectorXd ref = ad * xv;
    std::vector<double> got = spmv(a, x);
    for (index_t i = 0; i < 50; ++i)
      CHECK(std::abs(got[i] - ref(i)) <= 1e-13 * (1.0 + std::abs(ref(i))));
  }
}

TEST_CASE("matrix market round trip") {
  std::mt19937 rng(31);
  SparseMatrix a =
      csr_from_triplets(random_symmetric_triplets(12, 0.3, rng), 12, 12);
  auto path = std::filesystem::temp_directory_path() / "mlssl_rt.mtx";
  write_matrix_market(a, path.string());
  SparseMatrix b = read_matrix_market(path.string());
  CHECK(a.row_ptr == b.row_ptr);
  CHECK(a.col_idx == b.col_idx);
  CHECK(a.values == b.values);
  std::filesystem::remove(path);
}

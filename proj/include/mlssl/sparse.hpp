#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace mlssl {

using index_t = std::int64_t;

/// Compressed sparse row matrix in canonical form: within each row the column
/// indices are strictly increasing, there are no duplicates, no explicit
/// zeros, and every stored value is finite. Immutable after construction.
struct SparseMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<index_t> row_ptr;  // length n_rows+1, row_ptr[0]=0
  std::vector<std::int32_t> col_idx;
  std::vector<double> values;

  index_t nnz() const { return static_cast<index_t>(values.size()); }
  bool is_symmetric() const;
  SparseMatrix transposed() const;
  double row_norm2(index_t row) const;
};

struct Triplet {
  index_t row;
  index_t col;
  double value;
};

/// Builds a canonical CSR matrix from (row, col, value) triplets. Duplicate
/// coordinates are summed; entries that sum to exactly zero are dropped.
SparseMatrix csr_from_triplets(std::vector<Triplet> triplets, index_t n_rows,
                               index_t n_cols);

SparseMatrix csr_identity(index_t n);

/// Complex vectors are kept as split real/imaginary arrays so that real
/// operators need no complex code path.
struct ComplexVector {
  std::vector<double> re;
  std::vector<double> im;

  ComplexVector() = default;
  explicit ComplexVector(std::size_t n) : re(n, 0.0), im(n, 0.0) {}
  std::size_t size() const { return re.size(); }
};

// y = A x, deterministic CSR accumulation order.
void spmv(const SparseMatrix& a, const std::vector<double>& x,
          std::vector<double>& y);
std::vector<double> spmv(const SparseMatrix& a, const std::vector<double>& x);

void spmv_complex(const SparseMatrix& a, const ComplexVector& x,
                  ComplexVector& y);
ComplexVector spmv_complex(const SparseMatrix& a, const ComplexVector& x);

// Matrix Market coordinate format, symmetric real, 1-based on disk.
SparseMatrix read_matrix_market(const std::string& path);
void write_matrix_market(const SparseMatrix& a, const std::string& path);

// Small dense-vector helpers shared by the solvers.
double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);
void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y);

}  // namespace mlssl

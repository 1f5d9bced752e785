#include "mlssl/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mlssl {

bool SparseMatrix::is_symmetric() const {
  if (n_rows != n_cols) return false;
  SparseMatrix t = transposed();
  return t.row_ptr == row_ptr && t.col_idx == col_idx && t.values == values;
}

SparseMatrix SparseMatrix::transposed() const {
  SparseMatrix t;
  t.n_rows = n_cols;
  t.n_cols = n_rows;
  t.row_ptr.assign(static_cast<std::size_t>(n_cols) + 1, 0);
  t.col_idx.resize(values.size());
  t.values.resize(values.size());
  for (std::int32_t c : col_idx) t.row_ptr[static_cast<std::size_t>(c) + 1]++;
  for (index_t i = 0; i < n_cols; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
  std::vector<index_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (index_t r = 0; r < n_rows; ++r) {
    for (index_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      index_t pos = next[col_idx[k]]++;
      t.col_idx[pos] = static_cast<std::int32_t>(r);
      t.values[pos] = values[k];
    }
  }
  return t;
}

double SparseMatrix::row_norm2(index_t row) const {
  double s = 0.0;
  for (index_t k = row_ptr[row]; k < row_ptr[row + 1]; ++k)
    s += values[k] * values[k];
  return std::sqrt(s);
}

SparseMatrix csr_from_triplets(std::vector<Triplet> triplets, index_t n_rows,
                               index_t n_cols) {
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
      throw std::invalid_argument("csr_from_triplets: index out of range (" +
                                  std::to_string(t.row) + "," +
                                  std::to_string(t.col) + ")");
    if (!std::isfinite(t.value))
      throw std::invalid_argument("csr_from_triplets: non-finite value");
  }
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) {
              return std::tie(a.row, a.col) < std::tie(b.row, b.col);
            });
  SparseMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.row_ptr.assign(static_cast<std::size_t>(n_rows) + 1, 0);
  std::size_t i = 0;
  while (i < triplets.size()) {
    index_t r = triplets[i].row;
    index_t c = triplets[i].col;
    double v = triplets[i].value;
    std::size_t j = i + 1;
    while (j < triplets.size() && triplets[j].row == r && triplets[j].col == c)
      v += triplets[j++].value;
    if (v != 0.0) {
      m.col_idx.push_back(static_cast<std::int32_t>(c));
      m.values.push_back(v);
      m.row_ptr[r + 1]++;
    }
    i = j;
  }
  for (index_t r = 0; r < n_rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

SparseMatrix csr_identity(index_t n) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return csr_from_triplets(std::move(t), n, n);
}

void spmv(const SparseMatrix& a, const std::vector<double>& x,
          std::vector<double>& y) {
  if (static_cast<index_t>(x.size()) != a.n_cols)
    throw std::invalid_argument("spmv: dimension mismatch");
  y.assign(static_cast<std::size_t>(a.n_rows), 0.0);
  for (index_t r = 0; r < a.n_rows; ++r) {
    double s = 0.0;
    for (index_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      s += a.values[k] * x[static_cast<std::size_t>(a.col_idx[k])];
    y[static_cast<std::size_t>(r)] = s;
  }
}

std::vector<double> spmv(const SparseMatrix& a, const std::vector<double>& x) {
  std::vector<double> y;
  spmv(a, x, y);
  return y;
}

void spmv_complex(const SparseMatrix& a, const ComplexVector& x,
                  ComplexVector& y) {
  if (x.re.size() != x.im.size())
    throw std::invalid_argument("spmv_complex: re/im length mismatch");
  spmv(a, x.re, y.re);
  spmv(a, x.im, y.im);
}

ComplexVector spmv_complex(const SparseMatrix& a, const ComplexVector& x) {
  ComplexVector y;
  spmv_complex(a, x, y);
  return y;
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw std::invalid_argument(path + ": missing MatrixMarket header");
  std::istringstream hs(line);
  std::string tag, object, format, field, symmetry;
  hs >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate")
    throw std::invalid_argument(path + ": only coordinate matrices supported");
  bool pattern = (field == "pattern");
  bool symmetric = (symmetry == "symmetric");
  if (!symmetric && symmetry != "general")
    throw std::invalid_argument(path + ": unsupported symmetry " + symmetry);
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream ds(line);
  index_t rows, cols, entries;
  if (!(ds >> rows >> cols >> entries))
    throw std::invalid_argument(path + ": bad size line");
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(entries) * (symmetric ? 2 : 1));
  for (index_t e = 0; e < entries; ++e) {
    index_t i, j;
    double v = 1.0;
    if (!(in >> i >> j)) throw std::invalid_argument(path + ": truncated data");
    if (!pattern && !(in >> v))
      throw std::invalid_argument(path + ": truncated data");
    trip.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) trip.push_back({j - 1, i - 1, v});
  }
  return csr_from_triplets(std::move(trip), rows, cols);
}

void write_matrix_market(const SparseMatrix& a, const std::string& path) {
  if (!a.is_symmetric())
    throw std::invalid_argument("write_matrix_market: matrix not symmetric");
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path + " for write");
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  index_t lower = 0;
  for (index_t r = 0; r < a.n_rows; ++r)
    for (index_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      if (a.col_idx[k] <= r) ++lower;
  out << a.n_rows << " " << a.n_cols << " " << lower << "\n";
  char buf[64];
  for (index_t r = 0; r < a.n_rows; ++r) {
    for (index_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      if (a.col_idx[k] > r) continue;
      std::snprintf(buf, sizeof(buf), "%.17g", a.values[k]);
      out << (r + 1) << " " << (a.col_idx[k] + 1) << " " << buf << "\n";
    }
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace mlssl

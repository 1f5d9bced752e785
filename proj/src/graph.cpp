#include "mlssl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mlssl {

MultilayerGraph make_multilayer(std::vector<SparseMatrix> layers,
                                std::vector<std::string> names) {
  if (layers.empty())
    throw std::invalid_argument("make_multilayer: no layers");
  index_t n = layers[0].n_rows;
  for (std::size_t t = 0; t < layers.size(); ++t) {
    const SparseMatrix& w = layers[t];
    if (w.n_rows != n || w.n_cols != n)
      throw std::invalid_argument("make_multilayer: layer " +
                                  std::to_string(t) + " dimension mismatch");
    if (!w.is_symmetric())
      throw std::invalid_argument("make_multilayer: layer " +
                                  std::to_string(t) + " not symmetric");
    for (double v : w.values)
      if (v < 0.0)
        throw std::invalid_argument("make_multilayer: layer " +
                                    std::to_string(t) + " has negative weight");
  }
  MultilayerGraph g;
  g.n = n;
  g.layers = std::move(layers);
  if (names.empty()) {
    for (std::size_t t = 0; t < g.layers.size(); ++t)
      names.push_back("layer" + std::to_string(t));
  }
  g.layer_names = std::move(names);
  return g;
}

std::vector<double> ShiftedLaplacian::apply(
    const std::vector<double>& x) const {
  std::vector<double> y = spmv(base, x);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += shift * x[i];
  return y;
}

SparseMatrix normalized_laplacian(const SparseMatrix& w,
                                  IsolatedNodePolicy policy) {
  if (w.n_rows != w.n_cols)
    throw std::invalid_argument("normalized_laplacian: matrix not square");
  const index_t n = w.n_rows;
  std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
  for (index_t r = 0; r < n; ++r)
    for (index_t k = w.row_ptr[r]; k < w.row_ptr[r + 1]; ++k)
      degree[static_cast<std::size_t>(r)] += w.values[k];

  std::vector<index_t> isolated;
  for (index_t r = 0; r < n; ++r)
    if (degree[static_cast<std::size_t>(r)] <= 0.0) isolated.push_back(r);
  if (!isolated.empty() && policy == IsolatedNodePolicy::Error)
    throw std::invalid_argument("normalized_laplacian: node " +
                                std::to_string(isolated.front()) +
                                " has zero degree");
  for (index_t r : isolated) degree[static_cast<std::size_t>(r)] = 1.0;

  std::vector<double> inv_sqrt(static_cast<std::size_t>(n));
  for (index_t r = 0; r < n; ++r)
    inv_sqrt[static_cast<std::size_t>(r)] =
        1.0 / std::sqrt(degree[static_cast<std::size_t>(r)]);

  // L = I - D^{-1/2} W D^{-1/2}. An isolated node with its unit self-loop
  // contributes a zero row (1 - 1 on the diagonal).
  std::vector<Triplet> trip;
  trip.reserve(w.values.size() + static_cast<std::size_t>(n));
  for (index_t r = 0; r < n; ++r) {
    double diag = 1.0;
    for (index_t k = w.row_ptr[r]; k < w.row_ptr[r + 1]; ++k) {
      index_t c = w.col_idx[k];
      // scale factor formed first so (r,c) and (c,r) stay bit-identical
      double v = w.values[k] * (inv_sqrt[static_cast<std::size_t>(r)] *
                                inv_sqrt[static_cast<std::size_t>(c)]);
      if (c == r) {
        diag -= v;
      } else {
        trip.push_back({r, c, -v});
      }
    }
    if (std::binary_search(isolated.begin(), isolated.end(), r)) diag -= 1.0;
    if (diag != 0.0) trip.push_back({r, r, diag});
  }
  return csr_from_triplets(std::move(trip), n, n);
}

double shift_for_p(double p) {
  if (!std::isfinite(p) && p > 0) return 0.0;
  if (p > 0.0) return 0.0;
  return std::log10(1.0 + std::abs(p)) + 1e-6;
}

std::vector<ShiftedLaplacian> shifted_laplacians(const MultilayerGraph& graph,
                                                 double p,
                                                 IsolatedNodePolicy policy) {
  double eps = shift_for_p(p);
  std::vector<ShiftedLaplacian> out;
  out.reserve(graph.layers.size());
  for (const SparseMatrix& w : graph.layers)
    out.push_back({normalized_laplacian(w, policy), eps});
  return out;
}

SparseMatrix knn_graph(const std::vector<std::vector<double>>& features,
                       index_t k, KnnSymmetrization sym) {
  const index_t n = static_cast<index_t>(features.size());
  if (n < k + 1)
    throw std::invalid_argument("knn_graph: need at least k+1 nodes");
  if (k < 1) throw std::invalid_argument("knn_graph: k must be >= 1");
  const std::size_t d = features[0].size();
  for (const auto& row : features)
    if (row.size() != d)
      throw std::invalid_argument("knn_graph: ragged feature rows");

  // center rows once; Pearson correlation is the cosine of centered rows
  std::vector<std::vector<double>> centered(static_cast<std::size_t>(n));
  std::vector<double> inv_norm(static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) {
    const auto& row = features[static_cast<std::size_t>(i)];
    double mean = std::accumulate(row.begin(), row.end(), 0.0) /
                  static_cast<double>(d);
    auto& c = centered[static_cast<std::size_t>(i)];
    c.resize(d);
    double ss = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      c[j] = row[j] - mean;
      ss += c[j] * c[j];
    }
    if (ss <= 0.0)
      throw std::invalid_argument("knn_graph: feature row " +
                                  std::to_string(i) + " has zero variance");
    inv_norm[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(ss);
  }

  std::vector<std::vector<index_t>> chosen(static_cast<std::size_t>(n));
  std::vector<std::pair<double, index_t>> scored;
  for (index_t i = 0; i < n; ++i) {
    scored.clear();
    scored.reserve(static_cast<std::size_t>(n - 1));
    for (index_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double corr = 0.0;
      const auto& ci = centered[static_cast<std::size_t>(i)];
      const auto& cj = centered[static_cast<std::size_t>(j)];
      for (std::size_t q = 0; q < d; ++q) corr += ci[q] * cj[q];
      corr *= inv_norm[static_cast<std::size_t>(i)] *
              inv_norm[static_cast<std::size_t>(j)];
      scored.emplace_back(corr, j);
    }
    // highest correlation first, ties to the lower index
    std::partial_sort(scored.begin(),
                      scored.begin() + static_cast<std::ptrdiff_t>(k),
                      scored.end(), [](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first > b.first;
                        return a.second < b.second;
                      });
    for (index_t q = 0; q < k; ++q)
      chosen[static_cast<std::size_t>(i)].push_back(
          scored[static_cast<std::size_t>(q)].second);
  }

  std::vector<Triplet> trip;
  for (index_t i = 0; i < n; ++i) {
    for (index_t j : chosen[static_cast<std::size_t>(i)]) {
      bool mutual =
          std::find(chosen[static_cast<std::size_t>(j)].begin(),
                    chosen[static_cast<std::size_t>(j)].end(),
                    i) != chosen[static_cast<std::size_t>(j)].end();
      bool keep = sym == KnnSymmetrization::Union || mutual;
      if (!keep) continue;
      index_t a = std::min(i, j), b = std::max(i, j);
      trip.push_back({a, b, 1.0});
      trip.push_back({b, a, 1.0});
    }
  }
  // duplicates collapse to one unit edge
  std::sort(trip.begin(), trip.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  trip.erase(std::unique(trip.begin(), trip.end(),
                         [](const Triplet& a, const Triplet& b) {
                           return a.row == b.row && a.col == b.col;
                         }),
             trip.end());
  return csr_from_triplets(std::move(trip), n, n);
}

std::vector<std::vector<double>> read_features_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument(path + ": bad numeric cell '" + cell + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument(path + ": empty feature file");
  return rows;
}

std::vector<int> read_labels_csv(const std::string& path, index_t n) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::vector<int> truth(static_cast<std::size_t>(n), -1);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw std::invalid_argument(path + ": expected 'node_id,class' rows");
    index_t node;
    int cls;
    try {
      node = std::stoll(a);
      cls = std::stoi(b);
    } catch (const std::exception&) {
      throw std::invalid_argument(path + ": bad row '" + line + "'");
    }
    if (node < 0 || node >= n)
      throw std::invalid_argument(path + ": node id out of range: " + a);
    if (cls < 1)
      throw std::invalid_argument(path + ": classes are 1-based, got " + b);
    truth[static_cast<std::size_t>(node)] = cls - 1;
  }
  for (index_t i = 0; i < n; ++i)
    if (truth[static_cast<std::size_t>(i)] < 0)
      throw std::invalid_argument(path + ": node " + std::to_string(i) +
                                  " has no label");
  return truth;
}

Dataset load_multilayer(const DatasetFiles& files) {
  std::vector<SparseMatrix> layers;
  std::vector<std::string> names;
  for (const std::string& path : files.mtx_layers) {
    layers.push_back(read_matrix_market(path));
    names.push_back(path);
  }
  std::vector<std::vector<std::vector<double>>> feats;
  for (const std::string& path : files.feature_layers)
    feats.push_back(read_features_csv(path));
  for (std::size_t i = 0; i < feats.size(); ++i) {
    layers.push_back(knn_graph(feats[i], files.knn_k));
    names.push_back(files.feature_layers[i]);
  }
  if (layers.empty()) throw std::invalid_argument("load_multilayer: no layers");
  index_t n = layers[0].n_rows;
  for (std::size_t t = 1; t < layers.size(); ++t)
    if (layers[t].n_rows != n)
      throw std::invalid_argument(
          "load_multilayer: layer size mismatch: " + names[t] + " has " +
          std::to_string(layers[t].n_rows) + " nodes, expected " +
          std::to_string(n));

  Dataset ds;
  ds.truth = read_labels_csv(files.labels_path, n);
  ds.num_classes = *std::max_element(ds.truth.begin(), ds.truth.end()) + 1;
  ds.graph = make_multilayer(std::move(layers), std::move(names));
  return ds;
}

}  // namespace mlssl

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlssl/sparse.hpp"

namespace mlssl {

/// T adjacency layers over a shared node set. Layers must be square,
/// exactly symmetric, nonnegative, with zero diagonal (unless the self-loop
/// policy added loops). Immutable after construction.
struct MultilayerGraph {
  index_t n = 0;
  std::vector<SparseMatrix> layers;
  std::vector<std::string> layer_names;

  index_t num_layers() const { return static_cast<index_t>(layers.size()); }
};

MultilayerGraph make_multilayer(std::vector<SparseMatrix> layers,
                                std::vector<std::string> names = {});

/// The operator L_sym + eps I kept as the sparse Laplacian plus a scalar.
struct ShiftedLaplacian {
  SparseMatrix base;
  double shift = 0.0;

  std::vector<double> apply(const std::vector<double>& x) const;
};

enum class IsolatedNodePolicy { Error, AddSelfLoop };

/// Symmetric normalized Laplacian I - D^{-1/2} W D^{-1/2}; spectrum in [0,2].
/// An isolated node is a hard error unless the self-loop policy is chosen,
/// which gives such nodes a unit self-loop first.
SparseMatrix normalized_laplacian(
    const SparseMatrix& w,
    IsolatedNodePolicy policy = IsolatedNodePolicy::Error);

/// Diagonal shift for the power mean: log10(1+|p|) + 1e-6 for p <= 0, else 0.
double shift_for_p(double p);

std::vector<ShiftedLaplacian> shifted_laplacians(
    const MultilayerGraph& graph, double p,
    IsolatedNodePolicy policy = IsolatedNodePolicy::Error);

enum class KnnSymmetrization { Union, Intersection };

/// Unweighted symmetric k-nearest-neighbour graph under Pearson correlation
/// between feature rows. Ties break toward the lower node index; the
/// symmetrization defaults to the union of the directed selections.
SparseMatrix knn_graph(const std::vector<std::vector<double>>& features,
                       index_t k,
                       KnnSymmetrization sym = KnnSymmetrization::Union);

struct DatasetFiles {
  std::vector<std::string> mtx_layers;
  std::vector<std::string> feature_layers;
  std::string labels_path;
  index_t knn_k = 10;
};

struct Dataset {
  MultilayerGraph graph;
  std::vector<int> truth;  // 0-based classes
  int num_classes = 0;
};

/// Layers come either from Matrix Market files or are built from feature
/// CSVs via knn_graph. Labels CSV rows are "node_id,class" with 0-based
/// node ids and classes 1..k.
Dataset load_multilayer(const DatasetFiles& files);

std::vector<std::vector<double>> read_features_csv(const std::string& path);
std::vector<int> read_labels_csv(const std::string& path, index_t n);

}  // namespace mlssl

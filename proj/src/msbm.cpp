#include "mlssl/msbm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mlssl {

namespace {

double canonical_uniform(std::mt19937_64& rng) {
  // strictly inside (0,1) so log(u) is finite
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::mt19937_64 layer_rng(std::uint64_t seed, std::uint64_t layer) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(layer),
                    static_cast<std::uint32_t>(layer >> 32)};
  return std::mt19937_64(seq);
}

// Emits the edges of one run [begin, end) of pairs (row, col) with constant
// probability via geometric gap skipping; equivalent to independent
// Bernoulli draws per pair.
template <typename Emit>
void sample_run(std::mt19937_64& rng, double prob, index_t begin, index_t end,
                const Emit& emit) {
  if (end <= begin || prob <= 0.0) return;
  if (prob >= 1.0) {
    for (index_t j = begin; j < end; ++j) emit(j);
    return;
  }
  const double log1mp = std::log1p(-prob);
  index_t j = begin;
  while (true) {
    double u = canonical_uniform(rng);
    index_t gap = static_cast<index_t>(std::floor(std::log(u) / log1mp));
    j += gap;
    if (j >= end) return;
    emit(j);
    ++j;
  }
}

}  // namespace

void MsbmParams::validate() const {
  if (k < 2) throw std::invalid_argument("MsbmParams: k must be >= 2");
  if (cluster_size < 1)
    throw std::invalid_argument("MsbmParams: cluster_size must be >= 1");
  if (layer_probs.empty())
    throw std::invalid_argument("MsbmParams: no layers");
  for (const auto& [pin, pout] : layer_probs)
    if (!(pin >= 0.0 && pin <= 1.0 && pout >= 0.0 && pout <= 1.0))
      throw std::invalid_argument("MsbmParams: probabilities must be in [0,1]");
}

std::vector<int> msbm_truth(const MsbmParams& params) {
  std::vector<int> truth(static_cast<std::size_t>(params.n()));
  for (index_t i = 0; i < params.n(); ++i)
    truth[static_cast<std::size_t>(i)] =
        static_cast<int>(i / params.cluster_size);
  return truth;
}

MultilayerGraph sample_msbm(const MsbmParams& params, std::uint64_t seed) {
  params.validate();
  const index_t n = params.n();
  const index_t csize = params.cluster_size;
  std::vector<SparseMatrix> layers;
  for (index_t t = 0; t < params.num_layers(); ++t) {
    auto [pin, pout] = params.layer_probs[static_cast<std::size_t>(t)];
    std::mt19937_64 rng = layer_rng(seed, static_cast<std::uint64_t>(t));
    std::vector<Triplet> trip;
    for (index_t i = 0; i < n; ++i) {
      index_t block_end = (i / csize + 1) * csize;
      auto emit = [&](index_t j) {
        trip.push_back({i, j, 1.0});
        trip.push_back({j, i, 1.0});
      };
      // same-class run then cross-class run, both with constant probability
      sample_run(rng, pin, i + 1, std::min(block_end, n), emit);
      sample_run(rng, pout, block_end, n, emit);
    }
    layers.push_back(csr_from_triplets(std::move(trip), n, n));
  }
  return make_multilayer(std::move(layers));
}

Eigen::MatrixXd expected_adjacency(const MsbmParams& params, index_t layer) {
  params.validate();
  if (layer < 0 || layer >= params.num_layers())
    throw std::invalid_argument("expected_adjacency: layer out of range");
  auto [pin, pout] = params.layer_probs[static_cast<std::size_t>(layer)];
  const index_t n = params.n();
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(n, n, pout);
  for (int c = 0; c < params.k; ++c)
    w.block(c * params.cluster_size, c * params.cluster_size,
            params.cluster_size, params.cluster_size)
        .setConstant(pin);
  return w;
}

std::vector<Eigen::VectorXd> canonical_eigenvectors(int k,
                                                    index_t cluster_size) {
  const index_t n = static_cast<index_t>(k) * cluster_size;
  std::vector<Eigen::VectorXd> chi;
  chi.push_back(Eigen::VectorXd::Ones(n));
  for (int r = 2; r <= k; ++r) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int j = 1; j <= r; ++j)
      v.segment((j - 1) * cluster_size, cluster_size).array() += 1.0;
    v.segment((r - 1) * cluster_size, cluster_size).array() -=
        static_cast<double>(r);
    chi.push_back(std::move(v));
  }
  return chi;
}

std::vector<double> rho_epsilon(const MsbmParams& params, double eps) {
  params.validate();
  std::vector<double> rho;
  rho.reserve(params.layer_probs.size());
  for (const auto& [pin, pout] : params.layer_probs) {
    double denom = pin + (params.k - 1) * pout;
    if (!(denom > 0.0))
      throw std::domain_error("rho_epsilon: p_in + (k-1) p_out must be > 0");
    rho.push_back(1.0 - (pin - pout) / denom + eps);
  }
  return rho;
}

bool predict_zero_error(const MsbmParams& params, double p, double eps) {
  // m_p with the +-inf sentinels equals the Corollary rule: some layer
  // (p -> -inf) or every layer (p -> +inf) with p_out < p_in.
  std::vector<double> rho = rho_epsilon(params, eps);
  return scalar_power_mean(rho, p) < 1.0 + eps;
}

UnbalancedPredicate predict_zero_error_unbalanced(const MsbmParams& params,
                                                  double p, double eps,
                                                  index_t n1, index_t n2,
                                                  double lambda) {
  if (params.k != 2)
    throw std::invalid_argument(
        "predict_zero_error_unbalanced: stated for k = 2 only");
  if (lambda != 1.0)
    throw std::invalid_argument(
        "predict_zero_error_unbalanced: stated for lambda = 1 only");
  if (n1 < 1 || n2 < 1 || n1 > params.cluster_size || n2 > params.cluster_size)
    throw std::invalid_argument("predict_zero_error_unbalanced: bad budget");
  UnbalancedPredicate out;
  out.power_mean = scalar_power_mean(rho_epsilon(params, eps), p);
  double total = static_cast<double>(n1 + n2);
  double top = total * ((1.0 + eps) * (1.0 + eps) + 1.0);
  double b1 = (top - 2.0 * static_cast<double>(n2)) /
              (2.0 * static_cast<double>(n2) + total * eps);
  double b2 = (top - 2.0 * static_cast<double>(n1)) /
              (2.0 * static_cast<double>(n1) + total * eps);
  out.exact_bound = std::min(b1, b2);
  out.sufficient_bound =
      std::min(static_cast<double>(n1) / static_cast<double>(n2),
               static_cast<double>(n2) / static_cast<double>(n1));
  out.zero_error = out.power_mean < out.exact_bound;
  out.sufficient_holds = out.power_mean < out.sufficient_bound;
  return out;
}

Eigen::MatrixXd expected_solution_matrix(const MsbmParams& params, double p,
                                         double eps,
                                         const std::vector<char>& labeled_mask,
                                         const Eigen::VectorXd* cost_diagonal,
                                         double mu) {
  params.validate();
  const index_t n = params.n();
  const int k = params.k;
  if (static_cast<index_t>(labeled_mask.size()) != n)
    throw std::invalid_argument("expected_solution_matrix: mask length");
  std::vector<int> truth = msbm_truth(params);

  std::vector<index_t> n_r(static_cast<std::size_t>(k), 0);
  for (index_t i = 0; i < n; ++i)
    if (labeled_mask[static_cast<std::size_t>(i)])
      n_r[static_cast<std::size_t>(truth[static_cast<std::size_t>(i)])]++;

  // per-class cost c_r (the theorems use one value per class)
  std::vector<double> c_r(static_cast<std::size_t>(k), 1.0);
  if (cost_diagonal) {
    for (index_t i = 0; i < n; ++i)
      if (labeled_mask[static_cast<std::size_t>(i)])
        c_r[static_cast<std::size_t>(truth[static_cast<std::size_t>(i)])] =
            (*cost_diagonal)(i);
  }

  double mp = scalar_power_mean(rho_epsilon(params, eps), p);
  double omega = 1.0 / (1.0 + mu * (1.0 + eps));
  double alpha = 1.0 / (1.0 + mu * eps) - omega;
  double beta = 1.0 / (1.0 + mu * mp) - omega;

  // ||chi_1||^2 = n; ||chi_j||^2 = |C| j (j-1) for j >= 2
  std::vector<double> chi_norm2(static_cast<std::size_t>(k) + 1, 0.0);
  chi_norm2[1] = static_cast<double>(n);
  for (int j = 2; j <= k; ++j)
    chi_norm2[static_cast<std::size_t>(j)] =
        static_cast<double>(params.cluster_size) * j * (j - 1.0);
  // entry of chi_j at a node of class c (1-based classes)
  auto chi_entry = [&](int j, int c) -> double {
    if (c < j) return 1.0;
    if (c == j) return 1.0 - static_cast<double>(j);
    return 0.0;
  };

  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, k);
  for (index_t i = 0; i < n; ++i) {
    int c = truth[static_cast<std::size_t>(i)] + 1;
    for (int r = 1; r <= k; ++r) {
      double g = (1.0 - r) * chi_entry(r, c) /
                 chi_norm2[static_cast<std::size_t>(r)];
      for (int j = r + 1; j <= k; ++j)
        g += chi_entry(j, c) / chi_norm2[static_cast<std::size_t>(j)];
      double val = c_r[static_cast<std::size_t>(r - 1)] *
                   static_cast<double>(n_r[static_cast<std::size_t>(r - 1)]) *
                   (alpha / static_cast<double>(n) + beta * g);
      if (labeled_mask[static_cast<std::size_t>(i)] && c == r)
        val += c_r[static_cast<std::size_t>(r - 1)] * omega;
      f(i, r - 1) = val;
    }
  }
  return f;
}

std::vector<Eigen::MatrixXd> expected_info3_layers(double p_in, double p_out,
                                                   index_t cluster_size) {
  const index_t n = 3 * cluster_size;
  std::vector<Eigen::MatrixXd> layers;
  for (int t = 0; t < 3; ++t) {
    Eigen::MatrixXd w(n, n);
    for (index_t i = 0; i < n; ++i) {
      int ci = static_cast<int>(i / cluster_size);
      for (index_t j = 0; j < n; ++j) {
        int cj = static_cast<int>(j / cluster_size);
        bool same_side = (ci == t) == (cj == t);
        w(i, j) = same_side ? p_in : p_out;
      }
    }
    layers.push_back(std::move(w));
  }
  return layers;
}

MultilayerGraph sample_info3(double p_in, double p_out, index_t cluster_size,
                             std::uint64_t seed) {
  const index_t n = 3 * cluster_size;
  std::vector<SparseMatrix> layers;
  for (index_t t = 0; t < 3; ++t) {
    std::mt19937_64 rng = layer_rng(seed, static_cast<std::uint64_t>(t));
    std::vector<Triplet> trip;
    auto cls = [&](index_t v) { return static_cast<int>(v / cluster_size); };
    for (index_t i = 0; i < n; ++i) {
      auto emit = [&](index_t j) {
        trip.push_back({i, j, 1.0});
        trip.push_back({j, i, 1.0});
      };
      // runs of constant probability along j > i: boundaries at cluster edges
      index_t j = i + 1;
      while (j < n) {
        index_t run_end = (cls(j) + 1) * cluster_size;
        bool same_side = (cls(i) == t) == (cls(j) == t);
        sample_run(rng, same_side ? p_in : p_out, j, std::min(run_end, n),
                   emit);
        j = run_end;
      }
    }
    layers.push_back(csr_from_triplets(std::move(trip), n, n));
  }
  return make_multilayer(std::move(layers));
}

index_t LabelBudget::resolve(int cls, index_t cluster_size) const {
  index_t want;
  if (!counts.empty()) {
    if (cls < 0 || cls >= static_cast<int>(counts.size()))
      throw std::invalid_argument("LabelBudget: class without a count");
    want = counts[static_cast<std::size_t>(cls)];
  } else {
    if (!(fraction > 0.0) || fraction > 1.0)
      throw std::invalid_argument("LabelBudget: fraction must be in (0,1]");
    want = std::lround(fraction * static_cast<double>(cluster_size));
    if (want < 1) want = 1;
  }
  if (want < 1 || want > cluster_size)
    throw std::invalid_argument("LabelBudget: infeasible budget " +
                                std::to_string(want) + " for class size " +
                                std::to_string(cluster_size));
  return want;
}

std::vector<char> sample_labels(const std::vector<int>& truth,
                                const LabelBudget& budget, int num_classes,
                                std::uint64_t seed) {
  const index_t n = static_cast<index_t>(truth.size());
  std::vector<std::vector<index_t>> members(
      static_cast<std::size_t>(num_classes));
  for (index_t i = 0; i < n; ++i) {
    int c = truth[static_cast<std::size_t>(i)];
    if (c < 0 || c >= num_classes)
      throw std::invalid_argument("sample_labels: class out of range");
    members[static_cast<std::size_t>(c)].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<char> mask(static_cast<std::size_t>(n), 0);
  for (int c = 0; c < num_classes; ++c) {
    auto& pool = members[static_cast<std::size_t>(c)];
    index_t want = budget.resolve(c, static_cast<index_t>(pool.size()));
    // partial Fisher-Yates with a pinned uniform-index draw
    for (index_t i = 0; i < want; ++i) {
      index_t span = static_cast<index_t>(pool.size()) - i;
      index_t pick = i + static_cast<index_t>(
                             canonical_uniform(rng) * static_cast<double>(span));
      if (pick >= static_cast<index_t>(pool.size()))
        pick = static_cast<index_t>(pool.size()) - 1;
      std::swap(pool[static_cast<std::size_t>(i)],
                pool[static_cast<std::size_t>(pick)]);
      mask[static_cast<std::size_t>(pool[static_cast<std::size_t>(i)])] = 1;
    }
  }
  return mask;
}

}  // namespace mlssl

#pragma once

#include <cstdint>
#include <vector>

#include "mlssl/elliptic.hpp"
#include "mlssl/graph.hpp"
#include "mlssl/krylov.hpp"
#include "mlssl/powermean.hpp"

namespace mlssl {

struct MatrixFreeConfig {
  int p = -1;  // negative integer
  double lambda = 1.0;
  double tau_quadrature = 1e-8;
  double outer_tol = 1e-8;
  double shifted_tol = 1e-8;
  double inner_tol = 1e-8;
  double ic_drop_tol = 1e-4;
  double spectral_safety = 1.01;
  index_t gmres_restart = 50;
  index_t gmres_max_iter = 1000;
  index_t pcg_max_iter = 500;
  index_t lanczos_iters = 30;
  std::uint64_t lanczos_seed = 20240117;
  bool concurrent_nodes = false;  // shifted solves in parallel, reduction
                                  // stays in node-index order
  index_t workers = 0;            // 0 = hardware concurrency

  void validate() const;
};

struct SpectralBounds {
  double m = 0.0;
  double big_m = 0.0;
};

struct MatfreeStats {
  index_t outer_iterations = 0;
  index_t shifted_solves = 0;
  index_t shifted_iterations = 0;
  index_t pcg_solves = 0;
  index_t pcg_iterations = 0;

  void merge(const MatfreeStats& other);
};

/// Shared read-only state of the scalable path: shifted layer Laplacians
/// and their incomplete Cholesky preconditioners, factored once per graph.
struct PowerMeanContext {
  std::vector<ShiftedLaplacian> layers;
  std::vector<IncompleteCholeskyFactor> preconditioners;
  MatrixFreeConfig config;

  index_t dim() const { return layers.empty() ? 0 : layers[0].base.n_rows; }
  index_t num_layers() const { return static_cast<index_t>(layers.size()); }
};

PowerMeanContext make_power_mean_context(
    const MultilayerGraph& graph, const MatrixFreeConfig& config,
    IsolatedNodePolicy policy = IsolatedNodePolicy::Error);

/// S_p y = sum_t A_t^{-|p|} y, each power step one PCG solve with the
/// layer's preconditioner.
std::vector<double> apply_s_p(const PowerMeanContext& ctx,
                              const std::vector<double>& y,
                              MatfreeStats* stats = nullptr);
ComplexVector apply_s_p_complex(const PowerMeanContext& ctx,
                                const ComplexVector& y,
                                MatfreeStats* stats = nullptr);

/// m from the Weyl sum of per-layer lambda_max estimates; M from Lanczos on
/// the S_p operator inflated by the safety factor.
SpectralBounds estimate_spectral_bounds(const PowerMeanContext& ctx,
                                        MatfreeStats* stats = nullptr);

ContourQuadrature make_quadrature(const PowerMeanContext& ctx,
                                  const SpectralBounds& bounds);

/// L_p y via the contour quadrature: N shifted complex solves
/// (z_i^2 I - S_p) x_i = y, accumulated as sum w_i z_i^2 x_i (the resolvent
/// identity form of the one S_p application), imaginary part, then the
/// prefactor and T^{-1/p} scaling.
std::vector<double> apply_l_p(const PowerMeanContext& ctx,
                              const ContourQuadrature& quad,
                              const std::vector<double>& y,
                              MatfreeStats* stats = nullptr);

/// Full pipeline: preconditioners, spectral bounds, N, coefficients, then
/// outer GMRES on (I + lambda L_p) per class.
LabelingResult matfree_ssl_solve(const MultilayerGraph& graph,
                                 const LabelingProblem& problem,
                                 const MatrixFreeConfig& config,
                                 const std::vector<int>* truth = nullptr,
                                 IsolatedNodePolicy policy = IsolatedNodePolicy::Error,
                                 MatfreeStats* stats = nullptr);

}  // namespace mlssl

#include "mlssl/matfree.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <thread>

namespace mlssl {

void MatrixFreeConfig::validate() const {
  if (p >= 0)
    throw std::invalid_argument("MatrixFreeConfig: p must be a negative integer");
  if (!(lambda > 0.0))
    throw std::invalid_argument("MatrixFreeConfig: lambda must be > 0");
  for (double t : {tau_quadrature, outer_tol, shifted_tol, inner_tol})
    if (!(t > 0.0 && t < 1.0))
      throw std::invalid_argument("MatrixFreeConfig: tolerances must be in (0,1)");
  if (ic_drop_tol < 0.0)
    throw std::invalid_argument("MatrixFreeConfig: negative ic_drop_tol");
  if (!(spectral_safety >= 1.0))
    throw std::invalid_argument("MatrixFreeConfig: spectral_safety >= 1");
}

void MatfreeStats::merge(const MatfreeStats& other) {
  outer_iterations += other.outer_iterations;
  shifted_solves += other.shifted_solves;
  shifted_iterations += other.shifted_iterations;
  pcg_solves += other.pcg_solves;
  pcg_iterations += other.pcg_iterations;
}

PowerMeanContext make_power_mean_context(const MultilayerGraph& graph,
                                         const MatrixFreeConfig& config,
                                         IsolatedNodePolicy policy) {
  config.validate();
  PowerMeanContext ctx;
  ctx.config = config;
  ctx.layers = shifted_laplacians(graph, static_cast<double>(config.p), policy);
  ctx.preconditioners.reserve(ctx.layers.size());
  for (std::size_t t = 0; t < ctx.layers.size(); ++t) {
    // A_t = L_sym + eps I assembled explicitly for the factorization
    const SparseMatrix& l = ctx.layers[t].base;
    std::vector<Triplet> trip;
    trip.reserve(l.values.size() + static_cast<std::size_t>(l.n_rows));
    for (index_t r = 0; r < l.n_rows; ++r)
      for (index_t k = l.row_ptr[r]; k < l.row_ptr[r + 1]; ++k)
        trip.push_back({r, l.col_idx[k], l.values[k]});
    for (index_t r = 0; r < l.n_rows; ++r)
      trip.push_back({r, r, ctx.layers[t].shift});
    SparseMatrix shifted = csr_from_triplets(std::move(trip), l.n_rows, l.n_cols);
    ctx.preconditioners.push_back(
        incomplete_cholesky(shifted, config.ic_drop_tol));
  }
  return ctx;
}

namespace {

std::vector<double> apply_s_p_real(const PowerMeanContext& ctx,
                                   const std::vector<double>& y,
                                   MatfreeStats* stats) {
  const index_t steps = -static_cast<index_t>(ctx.config.p);
  std::vector<double> acc(y.size(), 0.0);
  for (index_t t = 0; t < ctx.num_layers(); ++t) {
    RealOperator op = make_shifted_operator(ctx.layers[static_cast<std::size_t>(t)].base,
                                            ctx.layers[static_cast<std::size_t>(t)].shift);
    std::vector<double> v = y;
    for (index_t step = 0; step < steps; ++step) {
      auto [x, rep] = pcg_solve(op, &ctx.preconditioners[static_cast<std::size_t>(t)], v,
                                ctx.config.inner_tol, ctx.config.pcg_max_iter);
      if (!rep.converged)
        throw std::runtime_error("apply_s_p: inner PCG failed on layer " +
                                 std::to_string(t) + " power step " +
                                 std::to_string(step + 1));
      if (stats) {
        stats->pcg_solves++;
        stats->pcg_iterations += rep.iterations;
      }
      v = std::move(x);
    }
    axpy(1.0, v, acc);
  }
  return acc;
}

}  // namespace

std::vector<double> apply_s_p(const PowerMeanContext& ctx,
                              const std::vector<double>& y,
                              MatfreeStats* stats) {
  return apply_s_p_real(ctx, y, stats);
}

ComplexVector apply_s_p_complex(const PowerMeanContext& ctx,
                                const ComplexVector& y, MatfreeStats* stats) {
  ComplexVector out;
  out.re = apply_s_p_real(ctx, y.re, stats);
  out.im = apply_s_p_real(ctx, y.im, stats);
  return out;
}

SpectralBounds estimate_spectral_bounds(const PowerMeanContext& ctx,
                                        MatfreeStats* stats) {
  const index_t n = ctx.dim();
  const double p = static_cast<double>(ctx.config.p);
  double m = 0.0;
  for (index_t t = 0; t < ctx.num_layers(); ++t) {
    const ShiftedLaplacian& layer = ctx.layers[static_cast<std::size_t>(t)];
    RealOperator op = make_shifted_operator(layer.base, layer.shift);
    double lam_max = lanczos_extreme(op, Extreme::Max,
                                     std::min<index_t>(n, 100),
                                     ctx.config.lanczos_seed + 7919 * (t + 1));
    // tiny inflation keeps the Weyl sum a true lower bound when Lanczos
    // approaches lambda_max from below
    m += std::pow(lam_max * (1.0 + 1e-6), p);
  }
  RealOperator s_op{n, [&ctx, stats](const std::vector<double>& x,
                                     std::vector<double>& yv) {
                      yv = apply_s_p_real(ctx, x, stats);
                    }};
  double lam_max_sp =
      lanczos_extreme(s_op, Extreme::Max,
                      std::min<index_t>(n, ctx.config.lanczos_iters),
                      ctx.config.lanczos_seed);
  SpectralBounds b;
  b.m = m;
  b.big_m = lam_max_sp * ctx.config.spectral_safety;
  if (!(b.m > 0.0) || !(b.big_m >= b.m))
    throw std::runtime_error("estimate_spectral_bounds: inconsistent bounds m=" +
                             std::to_string(b.m) + " M=" +
                             std::to_string(b.big_m));
  return b;
}

ContourQuadrature make_quadrature(const PowerMeanContext& ctx,
                                  const SpectralBounds& bounds) {
  index_t n_points =
      num_contour_points(bounds.m, bounds.big_m, ctx.config.tau_quadrature);
  return contour_coefficients(bounds.m, bounds.big_m, n_points, ctx.config.p);
}

namespace {

struct ShiftedSolve {
  ComplexVector x;
  SolveReport report;
};

ShiftedSolve solve_shifted(const PowerMeanContext& ctx,
                           std::complex<double> z2,
                           const std::vector<double>& y,
                           MatfreeStats* stats) {
  const index_t n = ctx.dim();
  ComplexOperator op{n, [&ctx, z2, stats](const ComplexVector& v,
                                          ComplexVector& out) {
                       ComplexVector sp = apply_s_p_complex(ctx, v, stats);
                       out.re.resize(v.size());
                       out.im.resize(v.size());
                       for (std::size_t q = 0; q < v.size(); ++q) {
                         out.re[q] = z2.real() * v.re[q] - z2.imag() * v.im[q] -
                                     sp.re[q];
                         out.im[q] = z2.real() * v.im[q] + z2.imag() * v.re[q] -
                                     sp.im[q];
                       }
                     }};
  ComplexVector b(y.size());
  b.re = y;
  auto [x, rep] = gmres_solve_complex(op, b, ctx.config.shifted_tol,
                                      ctx.config.gmres_restart,
                                      ctx.config.gmres_max_iter);
  return {std::move(x), rep};
}

}  // namespace

std::vector<double> apply_l_p(const PowerMeanContext& ctx,
                              const ContourQuadrature& quad,
                              const std::vector<double>& y,
                              MatfreeStats* stats) {
  const index_t n = ctx.dim();
  if (static_cast<index_t>(y.size()) != n)
    throw std::invalid_argument("apply_l_p: dimension mismatch");
  const index_t num_nodes = quad.n_points;

  std::vector<ShiftedSolve> solves(static_cast<std::size_t>(num_nodes));
  index_t workers = 1;
  if (ctx.config.concurrent_nodes) {
    workers = ctx.config.workers > 0
                  ? ctx.config.workers
                  : static_cast<index_t>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
  }
  if (workers <= 1) {
    for (index_t i = 0; i < num_nodes; ++i) {
      std::complex<double> z = quad.nodes[static_cast<std::size_t>(i)];
      solves[static_cast<std::size_t>(i)] = solve_shifted(ctx, z * z, y, stats);
    }
  } else {
    std::vector<MatfreeStats> local(static_cast<std::size_t>(num_nodes));
    std::atomic<index_t> next{0};
    auto worker = [&]() {
      while (true) {
        index_t i = next.fetch_add(1);
        if (i >= num_nodes) break;
        std::complex<double> z = quad.nodes[static_cast<std::size_t>(i)];
        solves[static_cast<std::size_t>(i)] = solve_shifted(
            ctx, z * z, y, stats ? &local[static_cast<std::size_t>(i)] : nullptr);
      }
    };
    std::vector<std::thread> pool;
    for (index_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (stats)
      for (const auto& s : local) stats->merge(s);
  }

  // fixed index-order reduction keeps the result bit-identical regardless of
  // the worker count
  std::vector<double> acc_re(static_cast<std::size_t>(n), 0.0);
  std::vector<double> acc_im(static_cast<std::size_t>(n), 0.0);
  for (index_t i = 0; i < num_nodes; ++i) {
    const ShiftedSolve& s = solves[static_cast<std::size_t>(i)];
    if (!s.report.converged)
      throw std::runtime_error("apply_l_p: shifted solve " + std::to_string(i) +
                               " did not converge (residual " +
                               std::to_string(s.report.final_residual_norm) +
                               ")");
    if (stats) {
      stats->shifted_solves++;
      stats->shifted_iterations += s.report.iterations;
    }
    std::complex<double> z = quad.nodes[static_cast<std::size_t>(i)];
    std::complex<double> coeff =
        quad.node_weights[static_cast<std::size_t>(i)] * z * z;
    for (index_t q = 0; q < n; ++q) {
      double xr = s.x.re[static_cast<std::size_t>(q)];
      double xi = s.x.im[static_cast<std::size_t>(q)];
      acc_re[static_cast<std::size_t>(q)] +=
          coeff.real() * xr - coeff.imag() * xi;
      acc_im[static_cast<std::size_t>(q)] +=
          coeff.real() * xi + coeff.imag() * xr;
    }
  }
  double t_scale =
      std::pow(static_cast<double>(ctx.num_layers()),
               -1.0 / static_cast<double>(ctx.config.p));
  std::vector<double> out(static_cast<std::size_t>(n));
  for (index_t q = 0; q < n; ++q) {
    double v = quad.prefactor * t_scale * acc_im[static_cast<std::size_t>(q)];
    if (!std::isfinite(v))
      throw std::runtime_error("apply_l_p: non-finite output entry");
    out[static_cast<std::size_t>(q)] = v;
  }
  return out;
}

LabelingResult matfree_ssl_solve(const MultilayerGraph& graph,
                                 const LabelingProblem& problem,
                                 const MatrixFreeConfig& config,
                                 const std::vector<int>* truth,
                                 IsolatedNodePolicy policy,
                                 MatfreeStats* stats) {
  problem.validate();
  if (problem.p != static_cast<double>(config.p))
    throw std::invalid_argument(
        "matfree_ssl_solve: problem.p and config.p disagree");
  PowerMeanContext ctx = make_power_mean_context(graph, config, policy);
  SpectralBounds bounds = estimate_spectral_bounds(ctx, stats);
  ContourQuadrature quad = make_quadrature(ctx, bounds);

  const index_t n = ctx.dim();
  RealOperator outer{n, [&](const std::vector<double>& v,
                            std::vector<double>& out) {
                       out = apply_l_p(ctx, quad, v, stats);
                       for (index_t q = 0; q < n; ++q)
                         out[static_cast<std::size_t>(q)] =
                             v[static_cast<std::size_t>(q)] +
                             config.lambda * out[static_cast<std::size_t>(q)];
                     }};

  LabelingResult res;
  res.f = Eigen::MatrixXd::Zero(n, problem.num_classes());
  for (index_t r = 0; r < problem.num_classes(); ++r) {
    std::vector<double> rhs(static_cast<std::size_t>(n));
    for (index_t q = 0; q < n; ++q) {
      double v = problem.y(q, r);
      if (problem.cost_diagonal) v *= (*problem.cost_diagonal)(q);
      rhs[static_cast<std::size_t>(q)] = v;
    }
    auto [x, rep] = gmres_solve(outer, rhs, config.outer_tol,
                                config.gmres_restart, config.gmres_max_iter);
    if (!rep.converged)
      throw std::runtime_error("matfree_ssl_solve: outer GMRES failed on class " +
                               std::to_string(r));
    if (stats) stats->outer_iterations += rep.iterations;
    for (index_t q = 0; q < n; ++q)
      res.f(q, r) = x[static_cast<std::size_t>(q)];
    res.class_reports.push_back(rep);
  }
  res.predicted_labels = assign_labels(res.f);
  if (truth)
    res.test_error =
        test_error(res.predicted_labels, *truth, problem.labeled_mask);
  return res;
}

}  // namespace mlssl

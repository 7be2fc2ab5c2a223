#include "tritz/solver.hpp"

#include "block_assembly.hpp"
#include "tritz/rng.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tritz {

namespace {

constexpr double kDegenerateNorm = 1e-14;

void validate(const SolverOptions& opts) {
  if (opts.max_sweeps < 1) throw std::invalid_argument("solver: max_sweeps must be >= 1");
  if (opts.energy_tol <= 0.0 || opts.cg_tol <= 0.0 || opts.regularization <= 0.0)
    throw std::invalid_argument("solver: tolerances must be positive");
  if (opts.mode == SolverMode::GD && !opts.gd_learning_rate)
    throw std::invalid_argument("solver: GD mode needs gd_learning_rate");
}

double frobenius_dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

// Dense assembly of H + eps I over flattened (k*N + j) indices, then LDLT.
Eigen::MatrixXd dense_block_solve(const BlockQuadraticForm& q, double eps) {
  const Eigen::Index P = q.alpha.rows();
  const Eigen::Index N = q.mass.size();
  const Eigen::Index n = P * N;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  auto band = [](const SymTridiag& T, Eigen::Index j, Eigen::Index m) -> double {
    if (j == m) return T.diag[j];
    if (j + 1 == m) return T.off[j];
    if (m + 1 == j) return T.off[m];
    return 0.0;
  };
  for (Eigen::Index k = 0; k < P; ++k) {
    for (Eigen::Index l = 0; l < P; ++l) {
      for (Eigen::Index j = 0; j < N; ++j) {
        for (Eigen::Index m = std::max<Eigen::Index>(0, j - 1);
             m <= std::min(N - 1, j + 1); ++m) {
          H(k * N + j, l * N + m) +=
              q.alpha(k, l) * band(q.stiff, j, m) + q.beta(k, l) * band(q.mass, j, m);
        }
      }
    }
  }
  H.diagonal().array() += eps;
  Eigen::VectorXd rhs(n);
  for (Eigen::Index k = 0; k < P; ++k) rhs.segment(k * N, N) = q.g.row(k).transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("solve_block: dense factorization failed");
  const Eigen::VectorXd x = ldlt.solve(rhs);
  Eigen::MatrixXd X(P, N);
  for (Eigen::Index k = 0; k < P; ++k) X.row(k) = x.segment(k * N, N).transpose();
  return X;
}

struct CgOutcome {
  Eigen::MatrixXd x;
  int iterations = 0;
  bool converged = false;
};

// CG on (H + eps I) X = g with Frobenius inner products. Every iterate has a
// block energy no larger than the warm start's, so ALS sweeps stay monotone
// even on early termination.
CgOutcome cg_block_solve(const BlockQuadraticForm& q, const Eigen::MatrixXd& X0,
                         double eps, double tol, int max_iters) {
  CgOutcome out;
  out.x = X0;
  const auto apply = [&](const Eigen::MatrixXd& X) {
    return (apply_block_hessian(q, X) + eps * X).eval();
  };
  Eigen::MatrixXd r = q.g - apply(out.x);
  const double gnorm = q.g.norm();
  const double threshold = tol * (gnorm > 0.0 ? gnorm : 1.0);
  double rho = frobenius_dot(r, r);
  if (std::sqrt(rho) <= threshold) {
    out.converged = true;
    return out;
  }
  Eigen::MatrixXd p = r;
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::MatrixXd hp = apply(p);
    const double denom = frobenius_dot(p, hp);
    if (!(denom > 0.0) || !std::isfinite(denom)) break;
    const double step = rho / denom;
    out.x += step * p;
    r -= step * hp;
    ++out.iterations;
    const double rho_next = frobenius_dot(r, r);
    if (!std::isfinite(rho_next)) break;
    if (std::sqrt(rho_next) <= threshold) {
      out.converged = true;
      return out;
    }
    p = r + (rho_next / rho) * p;
    rho = rho_next;
  }
  return out;
}

double block_regularization(const BlockQuadraticForm& q, double eps0) {
  const double trace_h =
      q.alpha.trace() * q.stiff.trace() + q.beta.trace() * q.mass.trace();
  const double n = static_cast<double>(q.alpha.rows()) * static_cast<double>(q.mass.size());
  return eps0 * std::abs(trace_h) / n;
}

}  // namespace

Eigen::MatrixXd solve_block(const BlockQuadraticForm& q, const Eigen::MatrixXd& X0,
                            const SolverOptions& opts, BlockSolveStats* stats) {
  if (X0.rows() != q.alpha.rows() || X0.cols() != q.mass.size())
    throw std::invalid_argument("solve_block: warm start shape mismatch");
  const Eigen::Index pn = X0.size();
  const double eps = block_regularization(q, opts.regularization);
  const int max_iters =
      opts.cg_max_iters > 0 ? opts.cg_max_iters : static_cast<int>(10 * pn);
  CgOutcome cg = cg_block_solve(q, X0, eps, opts.cg_tol, max_iters);
  if (stats) {
    stats->cg_iterations = cg.iterations;
    stats->used_dense = false;
  }
  if (cg.converged) return std::move(cg.x);
  if (pn <= opts.dense_solve_threshold) {
    if (stats) stats->used_dense = true;
    return dense_block_solve(q, eps);
  }
  throw std::runtime_error("solve_block: CG stalled and problem exceeds dense threshold");
}

CPFunction gd_step(const EllipticProblem& p, const CPFunction& u, double eta) {
  if (!(eta >= 0.0)) throw std::invalid_argument("gd_step: eta must be nonnegative");
  const std::vector<Eigen::MatrixXd> grad = full_gradient(p, u);
  CPFunction next = u;
  for (int i = 0; i < u.dim(); ++i)
    next.set_block(i, u.block(i) - eta * grad[static_cast<std::size_t>(i)]);
  return next;
}

namespace {

// Shared per-solve state for ALS sweeps.
struct AlsDriver {
  const EllipticProblem& problem;
  const SolverOptions& opts;
  detail::ProblemTables tables;
  detail::CPTables cp;

  AlsDriver(const EllipticProblem& p, const CPFunction& u, const SolverOptions& o)
      : problem(p), opts(o), tables(detail::build_problem_tables(p, u.meshes())) {
    cp.rebuild(u, tables);
  }

  // One pass of block solves plus the post-sweep rebalance. Returns the
  // energy of the rebalanced iterate. A block write is kept only when it does
  // not raise the unregularized block energy; the regularized solve can
  // otherwise drift upward by O(eps) near a fixed point.
  double run_sweep(CPFunction& u, std::vector<int>& iteration_counts) {
    iteration_counts.assign(static_cast<std::size_t>(u.dim()), 0);
    for (int m = 0; m < u.dim(); ++m) {
      const BlockQuadraticForm q = detail::assemble_block(tables, cp, m);
      BlockSolveStats stats;
      Eigen::MatrixXd X = solve_block(q, u.block(m), opts, &stats);
      iteration_counts[static_cast<std::size_t>(m)] = stats.cg_iterations;
      if (block_energy(q, X) <= block_energy(q, u.block(m))) {
        u.set_block(m, std::move(X));
        cp.update_dim(m, u, tables);
      }
    }
    u = rebalance(u);
    cp.rebuild(u, tables);
    return detail::energy_from_tables(tables, cp);
  }

  // Reseeds rank terms whose factor mass norm collapsed. Returns true when
  // anything changed (caches are rebuilt here).
  bool reseed_degenerate_terms(CPFunction& u, SplitMix64& reseed_rng) {
    const Eigen::MatrixXd norms = term_mass_norms(u);
    bool changed = false;
    for (int k = 0; k < u.rank(); ++k) {
      if (norms.row(k).minCoeff() >= kDegenerateNorm) continue;
      for (int i = 0; i < u.dim(); ++i) {
        Eigen::MatrixXd block = u.block(i);
        for (Eigen::Index j = 0; j < block.cols(); ++j)
          block(k, j) = reseed_rng.next_centered();
        u.set_block(i, std::move(block));
      }
      changed = true;
    }
    if (changed) cp.rebuild(u, tables);
    return changed;
  }
};

}  // namespace

std::pair<CPFunction, double> sweep(const EllipticProblem& p, const CPFunction& u,
                                    const SolverOptions& opts) {
  validate(opts);
  if (p.dim != u.dim()) throw std::invalid_argument("sweep: dimension mismatch");
  AlsDriver driver(p, u, opts);
  CPFunction next = u;
  std::vector<int> counts;
  const double e = driver.run_sweep(next, counts);
  return {std::move(next), e};
}

SolveResult solve(const EllipticProblem& p, const CPFunction& u0,
                  const SolverOptions& opts, const ProgressSink& sink) {
  validate(opts);
  if (p.dim != u0.dim()) throw std::invalid_argument("solve: dimension mismatch");

  CPFunction u = u0;
  EnergyReport report;

  if (opts.mode == SolverMode::GD) {
    const double eta = *opts.gd_learning_rate;
    double e = energy(p, u);
    report.energies.push_back(e);
    CPFunction best = u;
    double best_energy = e;
    for (int step = 0; step < opts.max_sweeps; ++step) {
      u = gd_step(p, u, eta);
      const double e_next = energy(p, u);
      report.energies.push_back(e_next);
      report.sweeps_run = step + 1;
      if (e_next < best_energy) {
        best_energy = e_next;
        best = u;
      }
      if (sink) sink({step, e_next, 0});
      if (std::abs(e_next - e) < opts.energy_tol * (1.0 + std::abs(e_next))) {
        report.converged = true;
        break;
      }
      e = e_next;
    }
    return {std::move(best), std::move(report)};
  }

  AlsDriver driver(p, u, opts);
  SplitMix64 reseed_rng(derive_seed(opts.seed, 0x7e5eedULL));

  double e = detail::energy_from_tables(driver.tables, driver.cp);
  report.energies.push_back(e);
  CPFunction best = u;
  double best_energy = e;

  for (int s = 0; s < opts.max_sweeps; ++s) {
    std::vector<int> counts;
    const double e_next = driver.run_sweep(u, counts);
    report.energies.push_back(e_next);
    report.block_solver_stats.push_back(counts);
    report.sweeps_run = s + 1;
    if (e_next < best_energy) {
      best_energy = e_next;
      best = u;
    }
    if (sink) {
      int max_cg = 0;
      for (int c : counts) max_cg = std::max(max_cg, c);
      sink({s, e_next, max_cg});
    }
    const bool small_change =
        std::abs(e_next - e) < opts.energy_tol * (1.0 + std::abs(e_next));
    e = e_next;
    if (small_change) {
      report.converged = true;
      break;
    }
    driver.reseed_degenerate_terms(u, reseed_rng);
  }
  return {std::move(best), std::move(report)};
}

}  // namespace tritz

#pragma once

#include "tritz/cp_function.hpp"
#include "tritz/ritz.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace tritz {

enum class SolverMode { ALS, GD };

struct SolverOptions {
  int max_sweeps = 200;
  /// Stop when |E_k - E_{k-1}| < energy_tol * (1 + |E_k|).
  double energy_tol = 1e-12;
  double cg_tol = 1e-12;
  /// 0 means 10 * P * N.
  int cg_max_iters = 0;
  /// Tikhonov scale eps0; each block Hessian gets eps0 * trace(H)/(P*N) added.
  double regularization = 1e-10;
  /// Dense assembly-and-factorize fallback is allowed while P*N stays below this.
  int dense_solve_threshold = 2000;
  std::uint64_t seed = 0;
  std::optional<double> gd_learning_rate;
  SolverMode mode = SolverMode::ALS;
};

struct SweepProgress {
  int sweep = 0;
  double energy = 0.0;
  int max_cg_iterations = 0;
};

using ProgressSink = std::function<void(const SweepProgress&)>;

struct EnergyReport {
  /// energies[0] is the initial energy, then one entry per sweep.
  std::vector<double> energies;
  int sweeps_run = 0;
  bool converged = false;
  /// Per sweep, per dimension CG iteration counts (0 for dense solves).
  std::vector<std::vector<int>> block_solver_stats;
};

struct SolveResult {
  CPFunction solution;
  EnergyReport report;
};

/// Minimizes the Ritz energy over the CP coefficients of u0. ALS mode cycles
/// exact regularized block solves; GD mode takes plain gradient steps with the
/// user-supplied learning rate. Returns the best iterate seen.
SolveResult solve(const EllipticProblem& p, const CPFunction& u0,
                  const SolverOptions& opts, const ProgressSink& sink = {});

/// One full ALS pass over all dimensions followed by a rebalance.
std::pair<CPFunction, double> sweep(const EllipticProblem& p, const CPFunction& u,
                                    const SolverOptions& opts);

struct BlockSolveStats {
  int cg_iterations = 0;
  bool used_dense = false;
};

/// Minimizes the regularized block energy: solves (H + eps I) X = g by CG with
/// warm start X0, falling back to a dense factorization within the threshold.
Eigen::MatrixXd solve_block(const BlockQuadraticForm& q, const Eigen::MatrixXd& X0,
                            const SolverOptions& opts, BlockSolveStats* stats = nullptr);

/// theta - eta * gradient, applied to every block.
CPFunction gd_step(const EllipticProblem& p, const CPFunction& u, double eta);

}  // namespace tritz

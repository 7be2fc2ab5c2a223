#pragma once

#include "tritz/cp_function.hpp"
#include "tritz/ritz.hpp"
#include "tritz/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tritz {

struct ExperimentConfig {
  int dim = 3;
  /// 0 means the default 2*dim.
  int rank = 0;
  /// Element counts per mesh run, strictly increasing. Must be non-empty;
  /// see default_mesh_sequence for the standard doubling ladder.
  std::vector<int> mesh_sequence;
  SolverOptions solver;
  std::string output_path;
  std::optional<std::string> checkpoint_path;
  std::uint64_t seed = 0;
};

struct ConvergenceRecord {
  double h = 0.0;
  double err_h1 = 0.0;
  double err_l2 = 0.0;
  double energy = 0.0;
  int sweeps = 0;
  double wall_seconds = 0.0;
  bool converged = false;
};

/// Normalized errors ||u - u_N||_1 / ||f||_0 and ||u - u_N||_0 / ||f||_0,
/// expanded through separable inner products. Requires p.exact.
std::pair<double, double> compute_errors(const EllipticProblem& p, const CPFunction& u_N);

/// Runs the mesh sequence for the cosine benchmark problem, writing one
/// flushed CSV row per mesh as results arrive. Solver non-convergence is
/// recorded in the row, not thrown. Mesh runs may execute in parallel, capped
/// by the TENSOR_RITZ_THREADS environment variable (default 1); rows are
/// written in mesh order either way.
std::vector<ConvergenceRecord> run_convergence_study(const ExperimentConfig& cfg);

/// Least-squares slopes of log(err) vs log(h) for both error columns. Rows at
/// the pre-asymptotic h = 1/2 are dropped; at least 3 usable rows required.
std::pair<double, double> fit_rate(const std::vector<ConvergenceRecord>& records);

void write_csv_header(std::ostream& out);
void append_csv_row(std::ostream& out, const ConvergenceRecord& record);
std::vector<ConvergenceRecord> read_csv(const std::string& path);

/// Doubling ladder 2,4,8,... up to the desk-scale cap (256 elements for
/// dim <= 3, 64 beyond).
std::vector<int> default_mesh_sequence(int dim);

/// Fills the defaulted rank and validates.
ExperimentConfig finalize_config(ExperimentConfig cfg);

/// Reads an ExperimentConfig from a JSON file mirroring the field names.
ExperimentConfig load_config(const std::string& path);

}  // namespace tritz

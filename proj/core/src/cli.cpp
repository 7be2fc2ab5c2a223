#include "tritz/cli.hpp"

#include "tritz/experiment.hpp"
#include "tritz/rng.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

namespace tritz {

namespace {

// "2:128" doubles from 2 to 128; "2,4,8,12" is an explicit list.
std::vector<int> parse_mesh_spec(const std::string& spec) {
  std::vector<int> out;
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const int lo = std::stoi(spec.substr(0, colon));
    const int hi = std::stoi(spec.substr(colon + 1));
    if (lo < 1 || hi < lo) throw CLI::ValidationError("--meshes", "bad range " + spec);
    for (int n = lo; n <= hi; n *= 2) out.push_back(n);
    return out;
  }
  std::size_t pos = 0;
  while (pos < spec.size()) {
    const auto comma = spec.find(',', pos);
    const std::string tok = spec.substr(pos, comma == std::string::npos ? spec.size() - pos
                                                                        : comma - pos);
    out.push_back(std::stoi(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

struct CommonFlags {
  int dim = 0;
  int rank = 0;
  std::string meshes;
  std::uint64_t seed = 0;
  int max_sweeps = 0;
  double energy_tol = 0.0;
  std::string config_path;
};

void apply_common(const CLI::App* cmd, const CommonFlags& flags, ExperimentConfig& cfg) {
  if (cmd->count("--dim")) cfg.dim = flags.dim;
  if (cmd->count("--rank")) cfg.rank = flags.rank;
  if (cmd->get_option_no_throw("--meshes") && cmd->count("--meshes"))
    cfg.mesh_sequence = parse_mesh_spec(flags.meshes);
  if (cmd->count("--seed")) cfg.seed = flags.seed;
  if (cmd->count("--max-sweeps")) cfg.solver.max_sweeps = flags.max_sweeps;
  if (cmd->count("--energy-tol")) cfg.solver.energy_tol = flags.energy_tol;
}

int cmd_study(const CLI::App* cmd, const CommonFlags& flags, const std::string& out_path,
              const std::string& checkpoint, bool quiet) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = load_config(flags.config_path);
  apply_common(cmd, flags, cfg);
  if (!out_path.empty()) cfg.output_path = out_path;
  if (!checkpoint.empty()) cfg.checkpoint_path = checkpoint;
  if (cfg.mesh_sequence.empty()) cfg.mesh_sequence = default_mesh_sequence(cfg.dim);
  if (cfg.output_path.empty())
    throw CLI::RequiredError("--out (or output_path in the config file)");
  const auto records = run_convergence_study(cfg);
  if (!quiet) {
    for (const auto& record : records)
      std::printf("h=%-12g err_h1=%-14.6e err_l2=%-14.6e energy=%-18.10f sweeps=%d%s\n",
                  record.h, record.err_h1, record.err_l2, record.energy, record.sweeps,
                  record.converged ? "" : "  [not converged]");
  }
  return 0;
}

int cmd_solve(const CLI::App* cmd, const CommonFlags& flags, int n_elems,
              const std::string& checkpoint, bool verbose) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = load_config(flags.config_path);
  apply_common(cmd, flags, cfg);
  cfg.mesh_sequence = {n_elems};
  cfg = finalize_config(cfg);

  const EllipticProblem problem = make_cosine_problem(cfg.dim);
  std::vector<Mesh1D> meshes(static_cast<std::size_t>(cfg.dim),
                             build_mesh(0.0, 1.0, n_elems));
  const std::uint64_t run_seed = derive_seed(cfg.seed, 0);
  CPFunction u0 = CPFunction::random_uniform(meshes, cfg.rank, run_seed);
  SolverOptions opts = cfg.solver;
  opts.seed = run_seed;
  ProgressSink sink;
  if (verbose)
    sink = [](const SweepProgress& progress) {
      std::printf("sweep %-4d energy=%-20.12f max_cg=%d\n", progress.sweep,
                  progress.energy, progress.max_cg_iterations);
    };
  SolveResult result = solve(problem, u0, opts, sink);
  const auto [err_h1, err_l2] = compute_errors(problem, result.solution);
  std::printf("energy=%.12f sweeps=%d converged=%d err_h1=%.6e err_l2=%.6e\n",
              energy(problem, result.solution), result.report.sweeps_run,
              result.report.converged ? 1 : 0, err_h1, err_l2);
  if (!checkpoint.empty()) save_checkpoint(result.solution, checkpoint);
  return 0;
}

int cmd_errors(const std::string& checkpoint) {
  const CPFunction u = load_checkpoint(checkpoint);
  const EllipticProblem problem = make_cosine_problem(u.dim());
  const auto [err_h1, err_l2] = compute_errors(problem, u);
  std::printf("err_h1=%.17g err_l2=%.17g energy=%.17g\n", err_h1, err_l2,
              energy(problem, u));
  return 0;
}

int cmd_rate(const std::string& in_path) {
  const auto records = read_csv(in_path);
  const auto [slope_h1, slope_l2] = fit_rate(records);
  std::printf("slope_h1=%.17g slope_l2=%.17g\n", slope_h1, slope_l2);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"CP-format Ritz solver for high-dimensional reaction-diffusion problems"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string out_path, checkpoint, in_path;
  int n_elems = 0;
  bool quiet = false;
  bool verbose = false;

  auto add_common = [&](CLI::App* cmd, bool with_meshes) {
    cmd->add_option("--dim", flags.dim, "Problem dimension d")->check(CLI::PositiveNumber);
    cmd->add_option("--rank", flags.rank, "CP rank P (default 2*dim)")
        ->check(CLI::PositiveNumber);
    if (with_meshes)
      cmd->add_option("--meshes", flags.meshes,
                      "Element counts: doubling range lo:hi or comma list");
    cmd->add_option("--seed", flags.seed, "Base seed for all randomness");
    cmd->add_option("--max-sweeps", flags.max_sweeps, "Solver sweep cap")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--energy-tol", flags.energy_tol,
                    "Relative energy-change stopping tolerance");
    cmd->add_option("--config", flags.config_path, "JSON config file (flags override)");
  };

  CLI::App* study = app.add_subcommand("study", "Run a mesh-refinement convergence study");
  add_common(study, true);
  study->add_option("--out", out_path, "Output CSV path");
  study->add_option("--checkpoint", checkpoint, "Checkpoint path prefix (one per mesh)");
  study->add_flag("--quiet", quiet, "Suppress per-mesh summary lines");

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve on a single mesh");
  add_common(solve_cmd, false);
  solve_cmd->add_option("--n-elems", n_elems, "Elements per dimension")
      ->required()
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--checkpoint", checkpoint, "Write the solution checkpoint here");
  solve_cmd->add_flag("--verbose", verbose, "Print per-sweep progress");

  CLI::App* errors_cmd =
      app.add_subcommand("errors", "Recompute errors for a saved checkpoint");
  errors_cmd->add_option("--checkpoint", checkpoint, "Checkpoint to load")->required();

  CLI::App* rate_cmd = app.add_subcommand("rate", "Fit convergence slopes from a study CSV");
  rate_cmd->add_option("--in", in_path, "Study CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (study->parsed()) return cmd_study(study, flags, out_path, checkpoint, quiet);
    if (solve_cmd->parsed()) return cmd_solve(solve_cmd, flags, n_elems, checkpoint, verbose);
    if (errors_cmd->parsed()) return cmd_errors(checkpoint);
    if (rate_cmd->parsed()) return cmd_rate(in_path);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace tritz

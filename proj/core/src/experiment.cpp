#include "tritz/experiment.hpp"

#include "tritz/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tritz {

namespace {

constexpr const char* kCsvVersionLine = "# tensor-ritz v1";
constexpr const char* kCsvHeader = "h,err_h1,err_l2,energy,sweeps,wall_seconds,converged";

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double sanitize_sqrt(double squared, const char* what) {
  if (squared < -1e-12)
    throw std::runtime_error(std::string(what) + ": squared norm is negative");
  return std::sqrt(std::max(squared, 0.0));
}

int max_elems(const CPFunction& u) {
  int n = 0;
  for (int i = 0; i < u.dim(); ++i) n = std::max(n, u.mesh(i).n_elems);
  return n;
}

}  // namespace

std::pair<double, double> compute_errors(const EllipticProblem& p, const CPFunction& u_N) {
  if (!p.exact) throw std::invalid_argument("compute_errors: problem has no exact solution");
  if (p.dim != u_N.dim())
    throw std::invalid_argument("compute_errors: dimension mismatch");
  const int ref = std::max(64, max_elems(u_N));
  const SepNorms exact_norms = sep_norms(*p.exact, ref);
  const SepNorms rhs_norms = sep_norms(p.rhs, ref);
  const double f_norm = std::sqrt(rhs_norms.l2_sq);

  const GramCache cache = gram_cache(u_N, u_N);
  const double un_l2 = inner_l2(cache);
  const double un_h1 = inner_h1_semi(cache);
  const double cross_l2 = inner_l2_sep(u_N, *p.exact);
  const double cross_h1 = inner_h1_semi_sep(u_N, *p.exact);

  const double l2_sq = exact_norms.l2_sq - 2.0 * cross_l2 + un_l2;
  const double h1_sq = l2_sq + (exact_norms.h1_semi_sq - 2.0 * cross_h1 + un_h1);
  const double err_l2 = sanitize_sqrt(l2_sq, "compute_errors L2") / f_norm;
  const double err_h1 = sanitize_sqrt(h1_sq, "compute_errors H1") / f_norm;
  return {err_h1, err_l2};
}

std::vector<int> default_mesh_sequence(int dim) {
  const int cap = dim <= 3 ? 256 : 64;
  std::vector<int> seq;
  for (int n = 2; n <= cap; n *= 2) seq.push_back(n);
  return seq;
}

ExperimentConfig finalize_config(ExperimentConfig cfg) {
  if (cfg.dim < 1) throw std::invalid_argument("config: dim must be >= 1");
  if (cfg.rank == 0) cfg.rank = 2 * cfg.dim;
  if (cfg.rank < 1) throw std::invalid_argument("config: rank must be >= 1");
  if (cfg.mesh_sequence.empty())
    throw std::invalid_argument("config: mesh_sequence must not be empty");
  for (std::size_t i = 0; i < cfg.mesh_sequence.size(); ++i) {
    if (cfg.mesh_sequence[i] < 1)
      throw std::invalid_argument("config: mesh sizes must be >= 1");
    if (i > 0 && cfg.mesh_sequence[i] <= cfg.mesh_sequence[i - 1])
      throw std::invalid_argument("config: mesh_sequence must be strictly increasing");
  }
  return cfg;
}

namespace {

int study_thread_cap() {
  const char* env = std::getenv("TENSOR_RITZ_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

std::string checkpoint_file_for(const std::string& base, int n_elems) {
  const std::string suffix = "-n" + std::to_string(n_elems) + ".json";
  const std::string ext = ".json";
  if (base.size() > ext.size() && base.ends_with(ext))
    return base.substr(0, base.size() - ext.size()) + suffix;
  return base + suffix;
}

struct MeshRunResult {
  ConvergenceRecord record;
  CPFunction solution;
};

MeshRunResult run_single_mesh(const ExperimentConfig& cfg, const EllipticProblem& problem,
                              int n_elems, std::uint64_t run_seed) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Mesh1D> meshes(static_cast<std::size_t>(cfg.dim), build_mesh(0.0, 1.0, n_elems));
  CPFunction u0 = CPFunction::random_uniform(meshes, cfg.rank, run_seed);
  SolverOptions opts = cfg.solver;
  opts.seed = run_seed;
  SolveResult result = solve(problem, u0, opts);
  const auto [err_h1, err_l2] = compute_errors(problem, result.solution);
  const auto stop = std::chrono::steady_clock::now();
  ConvergenceRecord record;
  record.h = meshes.front().h;
  record.err_h1 = err_h1;
  record.err_l2 = err_l2;
  // Energy of the returned (best) iterate, the one the errors refer to.
  record.energy = energy(problem, result.solution);
  record.sweeps = result.report.sweeps_run;
  record.wall_seconds = std::chrono::duration<double>(stop - start).count();
  record.converged = result.report.converged;
  return {record, std::move(result.solution)};
}

}  // namespace

std::vector<ConvergenceRecord> run_convergence_study(const ExperimentConfig& raw_cfg) {
  const ExperimentConfig cfg = finalize_config(raw_cfg);
  const EllipticProblem problem = make_cosine_problem(cfg.dim);

  std::ofstream csv;
  if (!cfg.output_path.empty()) {
    csv.open(cfg.output_path);
    if (!csv) throw std::runtime_error("study: cannot open " + cfg.output_path);
    write_csv_header(csv);
    csv.flush();
  }

  const int n_runs = static_cast<int>(cfg.mesh_sequence.size());
  const int cap = std::min(study_thread_cap(), n_runs);

  std::vector<ConvergenceRecord> records;
  records.reserve(static_cast<std::size_t>(n_runs));

  auto launch = [&](int idx) {
    const int n_elems = cfg.mesh_sequence[static_cast<std::size_t>(idx)];
    const std::uint64_t run_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(idx));
    return std::async(std::launch::async, run_single_mesh, std::cref(cfg),
                      std::cref(problem), n_elems, run_seed);
  };

  std::vector<std::future<MeshRunResult>> inflight;
  int next_to_launch = 0;
  for (; next_to_launch < cap; ++next_to_launch) inflight.push_back(launch(next_to_launch));

  for (int idx = 0; idx < n_runs; ++idx) {
    MeshRunResult result = inflight[static_cast<std::size_t>(idx)].get();
    if (next_to_launch < n_runs) inflight.push_back(launch(next_to_launch++));
    if (csv.is_open()) {
      append_csv_row(csv, result.record);
      csv.flush();
    }
    if (cfg.checkpoint_path) {
      save_checkpoint(result.solution,
                      checkpoint_file_for(*cfg.checkpoint_path,
                                          cfg.mesh_sequence[static_cast<std::size_t>(idx)]));
    }
    records.push_back(result.record);
  }
  return records;
}

std::pair<double, double> fit_rate(const std::vector<ConvergenceRecord>& records) {
  std::vector<const ConvergenceRecord*> usable;
  for (const auto& record : records)
    if (record.h != 0.5) usable.push_back(&record);
  if (usable.size() < 3)
    throw std::invalid_argument("fit_rate: needs at least 3 records away from h = 1/2");

  auto slope_of = [&](auto err_of) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(usable.size());
    for (const auto* record : usable) {
      const double err = err_of(*record);
      if (!(err > 0.0)) throw std::invalid_argument("fit_rate: errors must be positive");
      const double lx = std::log(record->h);
      const double ly = std::log(err);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  const double slope_h1 = slope_of([](const ConvergenceRecord& r) { return r.err_h1; });
  const double slope_l2 = slope_of([](const ConvergenceRecord& r) { return r.err_l2; });
  return {slope_h1, slope_l2};
}

void write_csv_header(std::ostream& out) {
  out << kCsvVersionLine << '\n' << kCsvHeader << '\n';
}

void append_csv_row(std::ostream& out, const ConvergenceRecord& record) {
  out << format_double(record.h) << ',' << format_double(record.err_h1) << ','
      << format_double(record.err_l2) << ',' << format_double(record.energy) << ','
      << record.sweeps << ',' << format_double(record.wall_seconds) << ','
      << (record.converged ? 1 : 0) << '\n';
}

std::vector<ConvergenceRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::vector<ConvergenceRecord> records;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen && line.rfind("h,", 0) == 0) {
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw std::runtime_error("read_csv: malformed row: " + line);
    ConvergenceRecord record;
    record.h = std::strtod(fields[0].c_str(), nullptr);
    record.err_h1 = std::strtod(fields[1].c_str(), nullptr);
    record.err_l2 = std::strtod(fields[2].c_str(), nullptr);
    record.energy = std::strtod(fields[3].c_str(), nullptr);
    record.sweeps = std::atoi(fields[4].c_str());
    record.wall_seconds = std::strtod(fields[5].c_str(), nullptr);
    record.converged = std::atoi(fields[6].c_str()) != 0;
    records.push_back(record);
  }
  return records;
}

namespace {

SolverOptions solver_from_json(const nlohmann::json& doc) {
  SolverOptions opts;
  if (doc.contains("max_sweeps")) opts.max_sweeps = doc["max_sweeps"].get<int>();
  if (doc.contains("energy_tol")) opts.energy_tol = doc["energy_tol"].get<double>();
  if (doc.contains("cg_tol")) opts.cg_tol = doc["cg_tol"].get<double>();
  if (doc.contains("cg_max_iters")) opts.cg_max_iters = doc["cg_max_iters"].get<int>();
  if (doc.contains("regularization"))
    opts.regularization = doc["regularization"].get<double>();
  if (doc.contains("dense_solve_threshold"))
    opts.dense_solve_threshold = doc["dense_solve_threshold"].get<int>();
  if (doc.contains("seed")) opts.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("gd_learning_rate"))
    opts.gd_learning_rate = doc["gd_learning_rate"].get<double>();
  if (doc.contains("mode")) {
    const std::string mode = doc["mode"].get<std::string>();
    if (mode == "ALS")
      opts.mode = SolverMode::ALS;
    else if (mode == "GD")
      opts.mode = SolverMode::GD;
    else
      throw std::invalid_argument("config: mode must be ALS or GD");
  }
  return opts;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  nlohmann::json doc;
  in >> doc;
  ExperimentConfig cfg;
  if (doc.contains("dim")) cfg.dim = doc["dim"].get<int>();
  if (doc.contains("rank")) cfg.rank = doc["rank"].get<int>();
  if (doc.contains("mesh_sequence"))
    cfg.mesh_sequence = doc["mesh_sequence"].get<std::vector<int>>();
  if (doc.contains("solver")) cfg.solver = solver_from_json(doc["solver"]);
  if (doc.contains("output_path")) cfg.output_path = doc["output_path"].get<std::string>();
  if (doc.contains("checkpoint_path"))
    cfg.checkpoint_path = doc["checkpoint_path"].get<std::string>();
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
  return cfg;
}

}  // namespace tritz

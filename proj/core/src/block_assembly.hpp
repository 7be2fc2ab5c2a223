#pragma once

// Internal shared machinery for the Ritz energy, its block restrictions, and
// the alternating solver. Keeps the per-dimension Gram contractions and load
// vector dot products incrementally updatable across block writes.

#include "tritz/cp_function.hpp"
#include "tritz/ritz.hpp"

#include <Eigen/Core>

#include <vector>

namespace tritz::detail {

// Fixed per-(problem, meshes) data: 1D Gram matrices and per-term load vectors.
struct ProblemTables {
  std::vector<SymTridiag> mass;
  std::vector<SymTridiag> stiff;
  std::vector<Eigen::MatrixXd> load;  // load[i] is R x N_i, row r = load vector of rhs term r
  std::vector<double> weights;        // rhs term weights
  double reaction = 0.0;
};

ProblemTables build_problem_tables(const EllipticProblem& p, const std::vector<Mesh1D>& meshes);

// Per-iterate data: Gram contractions s,t (P x P) and load dot products D (P x R).
struct CPTables {
  std::vector<Eigen::MatrixXd> s;
  std::vector<Eigen::MatrixXd> t;
  std::vector<Eigen::MatrixXd> D;

  void rebuild(const CPFunction& u, const ProblemTables& tables);
  void update_dim(int m, const CPFunction& u, const ProblemTables& tables);
};

double energy_from_tables(const ProblemTables& tables, const CPTables& cp);

BlockQuadraticForm assemble_block(const ProblemTables& tables, const CPTables& cp, int m);

}  // namespace tritz::detail

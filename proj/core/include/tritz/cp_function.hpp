#pragma once

#include "tritz/mesh.hpp"
#include "tritz/separable.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tritz {

/// Rank-P trial function u(x) = sum_k prod_i (row k of block i) . phi_i(x_i)
/// over per-dimension hat bases. Block i is P x N_i; row k holds the 1D
/// coefficients of rank term k in dimension i.
class CPFunction {
public:
  CPFunction(std::vector<Mesh1D> meshes, int rank);

  static CPFunction zeros(std::vector<Mesh1D> meshes, int rank);
  static CPFunction constant(std::vector<Mesh1D> meshes, int rank, double value);
  static CPFunction random_uniform(std::vector<Mesh1D> meshes, int rank,
                                   std::uint64_t seed);
  /// Per-dimension nodal interpolation of F; requires rank == F.rank().
  /// Term weights are folded into the dimension-0 block.
  static CPFunction nodal(std::vector<Mesh1D> meshes, int rank,
                          const SeparableFunction& F);

  int dim() const { return static_cast<int>(meshes_.size()); }
  int rank() const { return rank_; }
  const std::vector<Mesh1D>& meshes() const { return meshes_; }
  const Mesh1D& mesh(int i) const { return meshes_[static_cast<std::size_t>(i)]; }
  const Eigen::MatrixXd& block(int i) const { return factors_[static_cast<std::size_t>(i)]; }

  void set_block(int i, Eigen::MatrixXd X);

  std::int64_t parameter_count() const;

  bool same_meshes_as(const CPFunction& other) const;

  double evaluate(std::span<const double> x) const;

private:
  std::vector<Mesh1D> meshes_;
  std::vector<Eigen::MatrixXd> factors_;
  int rank_;
};

/// Per-dimension Gram contractions between two CP functions:
/// s[i](k,l) = row_k(u_i) . M_i . row_l(v_i), t[i] the same with the
/// stiffness matrix. Shape P_u x P_v.
struct GramCache {
  std::vector<Eigen::MatrixXd> s;
  std::vector<Eigen::MatrixXd> t;
};

GramCache gram_cache(const CPFunction& u, const CPFunction& v);

/// \int u v, evaluated as sum_{k,l} prod_i s[i](k,l).
double inner_l2(const CPFunction& u, const CPFunction& v);
double inner_l2(const GramCache& cache);

/// \int grad(u) . grad(v).
double inner_h1_semi(const CPFunction& u, const CPFunction& v);
double inner_h1_semi(const GramCache& cache);

/// \int u F for a separable F, via per-dimension load vectors.
double inner_l2_sep(const CPFunction& u, const SeparableFunction& F);

/// \int grad(u) . grad(F); requires derivative handles on F.
double inner_h1_semi_sep(const CPFunction& u, const SeparableFunction& F);

/// Multiplies the chosen dimension's block by c (scales the function by c).
CPFunction scale(const CPFunction& u, double c, int dim_index = 0);

/// Stacks rank blocks; the result represents u + v with rank P_u + P_v.
CPFunction concat_add(const CPFunction& u, const CPFunction& v);

/// P x d matrix of per-term, per-dimension mass norms sqrt(row_k M_i row_k).
Eigen::MatrixXd term_mass_norms(const CPFunction& u);

/// Rescales every rank term so its per-dimension factor mass norms all equal
/// the geometric mean of the originals. Terms with an exactly zero factor are
/// left untouched. The represented function is unchanged.
CPFunction rebalance(const CPFunction& u);

/// Checkpoint serialization (JSON). Numbers survive a save/load round trip
/// exactly.
void save_checkpoint(const CPFunction& u, const std::string& path);
CPFunction load_checkpoint(const std::string& path);

}  // namespace tritz

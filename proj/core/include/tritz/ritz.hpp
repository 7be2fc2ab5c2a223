#pragma once

#include "tritz/cp_function.hpp"
#include "tritz/mesh.hpp"
#include "tritz/separable.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace tritz {

/// Reaction-diffusion Neumann problem -Laplace(u) + reaction*u = rhs on a
/// tensor-product box, natural boundary conditions. The Ritz energy is
/// I(v) = 1/2 int(|grad v|^2 + reaction v^2) - int(rhs v).
struct EllipticProblem {
  int dim = 1;
  double reaction = 0.0;
  SeparableFunction rhs;
  std::optional<SeparableFunction> exact;
};

/// -Laplace(u) + pi^2 u = 2 pi^2 sum_k cos(pi x_k) on [0,1]^d,
/// whose solution is sum_k cos(pi x_k).
EllipticProblem make_cosine_problem(int dim);

double energy(const EllipticProblem& p, const CPFunction& u);

/// Partial derivatives of the energy with respect to every coefficient,
/// one P x N_i block per dimension.
std::vector<Eigen::MatrixXd> full_gradient(const EllipticProblem& p, const CPFunction& u);

/// The energy restricted to dimension m's coefficient block X is
///   E(X) = 1/2 <X, alpha X A_m + beta X M_m> - <g, X> + const.
struct BlockQuadraticForm {
  int dim_index = 0;
  Eigen::MatrixXd alpha;  // P x P, prod_{i != m} s[i]
  Eigen::MatrixXd beta;   // P x P, sum_{p != m} t[p] prod_{i != m,p} s[i] + c*alpha
  Eigen::MatrixXd g;      // P x N_m linear term
  SymTridiag mass;
  SymTridiag stiff;
};

BlockQuadraticForm block_quadratic(const EllipticProblem& p, const CPFunction& u, int m);

/// alpha X A_m + beta X M_m via tridiagonal row applies.
Eigen::MatrixXd apply_block_hessian(const BlockQuadraticForm& q, const Eigen::MatrixXd& X);

/// 1/2 <X, H X> - <g, X> (the block energy without its constant).
double block_energy(const BlockQuadraticForm& q, const Eigen::MatrixXd& X);

}  // namespace tritz

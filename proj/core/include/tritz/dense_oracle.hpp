#pragma once

// Brute-force reference implementations over the full tensor-product space.
// Test and verification support for tiny instances only; every entry point
// guards against exponential blowup and fails fast.

#include "tritz/cp_function.hpp"
#include "tritz/ritz.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace tritz::oracle {

/// Full order-d coefficient array, row-major with dimension 0 slowest.
struct DenseTensorFunction {
  std::vector<Mesh1D> meshes;
  std::vector<double> coeffs;

  int dim() const { return static_cast<int>(meshes.size()); }
  std::int64_t size() const { return static_cast<std::int64_t>(coeffs.size()); }
};

/// coeffs[j1,...,jd] = sum_k prod_i C_{k,i,j_i}.
DenseTensorFunction cp_to_dense(const CPFunction& u);

/// Nodal hat expansion of the dense coefficients at a point.
double evaluate(const DenseTensorFunction& w, std::span<const double> x);

/// Partial derivative of the nodal expansion along dimension m.
double evaluate_partial(const DenseTensorFunction& w, std::span<const double> x, int m);

/// Ritz energy evaluated with explicit Kronecker-structured loops.
double dense_energy(const EllipticProblem& p, const DenseTensorFunction& w);

/// Solves the full Galerkin system by dense factorization; returns the
/// minimizer and its energy.
std::pair<DenseTensorFunction, double> dense_galerkin_solve(
    const EllipticProblem& p, const std::vector<Mesh1D>& meshes);

using PointFn = std::function<double(std::span<const double>)>;

/// Full tensor-product Gauss quadrature of a pointwise integrand over every
/// element of every dimension.
double tensorized_integral(const PointFn& integrand, const std::vector<Mesh1D>& meshes,
                           const GaussRule& rule);

double tensorized_integral(const SeparableFunction& F, const std::vector<Mesh1D>& meshes,
                           const GaussRule& rule);

}  // namespace tritz::oracle

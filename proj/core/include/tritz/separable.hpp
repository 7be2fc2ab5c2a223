#pragma once

#include "tritz/mesh.hpp"

#include <span>
#include <vector>

namespace tritz {

/// One univariate factor of a separable term. The derivative handle may be
/// empty when the factor is only used in L2 pairings.
struct Univariate {
  UnivariateFn value;
  UnivariateFn deriv;
};

/// Analytic sum of rank-1 separable terms: F(x) = sum_r w_r prod_i g_{r,i}(x_i),
/// with every dimension living on the same interval [a, b].
class SeparableFunction {
public:
  SeparableFunction(int dim, std::vector<double> weights,
                    std::vector<std::vector<Univariate>> terms, double a = 0.0,
                    double b = 1.0);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(weights_.size()); }
  double weight(int r) const { return weights_[r]; }
  const Univariate& factor(int r, int i) const { return terms_[r][i]; }
  double domain_a() const { return a_; }
  double domain_b() const { return b_; }

  bool has_derivatives() const;

  double evaluate(std::span<const double> x) const;

  /// F(x) = value on the unit cube.
  static SeparableFunction constant(int dim, double value);

  /// F(x) = coeff * sum_k cos(pi x_k) on the unit cube, with derivatives.
  static SeparableFunction cosine_sum(int dim, double coeff);

private:
  int dim_;
  std::vector<double> weights_;
  std::vector<std::vector<Univariate>> terms_;
  double a_;
  double b_;
};

struct SepNorms {
  double l2_sq = 0.0;
  double h1_semi_sq = 0.0;
};

/// Squared L2 norm and H1 seminorm of F, by per-dimension composite Gauss
/// quadrature on a reference mesh of ref_elems (>= 64) elements.
SepNorms sep_norms(const SeparableFunction& F, int ref_elems = 64);

}  // namespace tritz

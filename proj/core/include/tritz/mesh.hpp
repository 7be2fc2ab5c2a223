#pragma once

#include <Eigen/Core>

#include <functional>

namespace tritz {

/// Uniform partition of the interval [a, b] into n_elems cells of width h.
/// Nodes are a + j*h for j = 0..n_elems.
struct Mesh1D {
  double a = 0.0;
  double b = 1.0;
  int n_elems = 1;
  double h = 1.0;
  int n_nodes = 2;

  double node(int j) const { return a + j * h; }

  bool same_as(const Mesh1D& other) const {
    return a == other.a && b == other.b && n_elems == other.n_elems;
  }
};

Mesh1D build_mesh(double a, double b, int n_elems);

/// Symmetric tridiagonal matrix: diag has n entries, off has n-1.
struct SymTridiag {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;

  Eigen::Index size() const { return diag.size(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  /// X * T for row-blocks X (each row of X is transformed by the matrix).
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& X) const;

  /// u^T T v.
  double quad_form(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

  double trace() const { return diag.sum(); }
};

/// 1D hat-function mass matrix: entries \int phi_j phi_n.
SymTridiag mass_matrix(const Mesh1D& mesh);

/// 1D hat-function stiffness matrix: entries \int phi_j' phi_n'.
SymTridiag stiffness_matrix(const Mesh1D& mesh);

/// Gauss-Legendre rule on the reference interval [-1, 1].
/// A rule with q nodes integrates polynomials of degree <= 2q-1 exactly.
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  int order() const { return static_cast<int>(nodes.size()); }
};

GaussRule gauss_rule(int order);

using UnivariateFn = std::function<double(double)>;

/// Component j is the per-element Gauss approximation of \int phi_j(x) g(x) dx.
Eigen::VectorXd load_vector(const Mesh1D& mesh, const UnivariateFn& g,
                            const GaussRule& rule);

/// Component j is the per-element Gauss approximation of \int phi_j'(x) gprime(x) dx.
Eigen::VectorXd load_vector_deriv(const Mesh1D& mesh, const UnivariateFn& gprime,
                                  const GaussRule& rule);

/// Nodal values g(node_j).
Eigen::VectorXd interpolate(const Mesh1D& mesh, const UnivariateFn& g);

}  // namespace tritz

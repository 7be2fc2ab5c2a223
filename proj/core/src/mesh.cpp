#include "tritz/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tritz {

Mesh1D build_mesh(double a, double b, int n_elems) {
  if (n_elems < 1) throw std::invalid_argument("build_mesh: n_elems must be >= 1");
  if (!(a < b)) throw std::invalid_argument("build_mesh: requires a < b");
  Mesh1D mesh;
  mesh.a = a;
  mesh.b = b;
  mesh.n_elems = n_elems;
  mesh.h = (b - a) / n_elems;
  mesh.n_nodes = n_elems + 1;
  return mesh;
}

Eigen::VectorXd SymTridiag::apply(const Eigen::VectorXd& x) const {
  const Eigen::Index n = size();
  if (x.size() != n) throw std::invalid_argument("SymTridiag::apply: size mismatch");
  Eigen::VectorXd y(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double v = diag[j] * x[j];
    if (j > 0) v += off[j - 1] * x[j - 1];
    if (j + 1 < n) v += off[j] * x[j + 1];
    y[j] = v;
  }
  return y;
}

Eigen::MatrixXd SymTridiag::apply_rows(const Eigen::MatrixXd& X) const {
  const Eigen::Index n = size();
  if (X.cols() != n) throw std::invalid_argument("SymTridiag::apply_rows: size mismatch");
  Eigen::MatrixXd Y(X.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Y.col(j) = diag[j] * X.col(j);
    if (j > 0) Y.col(j) += off[j - 1] * X.col(j - 1);
    if (j + 1 < n) Y.col(j) += off[j] * X.col(j + 1);
  }
  return Y;
}

double SymTridiag::quad_form(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  return u.dot(apply(v));
}

SymTridiag mass_matrix(const Mesh1D& mesh) {
  const int n = mesh.n_nodes;
  const double h = mesh.h;
  SymTridiag m;
  m.diag = Eigen::VectorXd::Constant(n, 2.0 * h / 3.0);
  m.diag[0] = h / 3.0;
  m.diag[n - 1] = h / 3.0;
  m.off = Eigen::VectorXd::Constant(n - 1, h / 6.0);
  return m;
}

SymTridiag stiffness_matrix(const Mesh1D& mesh) {
  const int n = mesh.n_nodes;
  const double h = mesh.h;
  SymTridiag a;
  a.diag = Eigen::VectorXd::Constant(n, 2.0 / h);
  a.diag[0] = 1.0 / h;
  a.diag[n - 1] = 1.0 / h;
  a.off = Eigen::VectorXd::Constant(n - 1, -1.0 / h);
  return a;
}

namespace {

// Legendre P_n(t) and P_{n-1}(t) by the three-term recurrence.
void legendre_pair(int n, double t, double& pn, double& pn_minus_1) {
  double p0 = 1.0;
  double p1 = t;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  pn = (n == 0) ? 1.0 : p1;
  pn_minus_1 = (n == 1) ? 1.0 : p0;
}

}  // namespace

GaussRule gauss_rule(int order) {
  if (order < 1 || order > 16)
    throw std::invalid_argument("gauss_rule: order must be in [1, 16]");
  const int n = order;
  Eigen::VectorXd nodes = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev estimate of the i-th largest root, refined by Newton.
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pn = 0.0, pm = 0.0;
    for (int iter = 0; iter < 64; ++iter) {
      legendre_pair(n, t, pn, pm);
      const double dpn = n * (t * pn - pm) / (t * t - 1.0);
      const double dt = pn / dpn;
      t -= dt;
      if (std::abs(dt) <= 1e-16 * std::max(1.0, std::abs(t))) break;
    }
    legendre_pair(n, t, pn, pm);
    const double dpn = n * (t * pn - pm) / (t * t - 1.0);
    const double w = 2.0 / ((1.0 - t * t) * dpn * dpn);
    nodes[i] = -t;
    nodes[n - 1 - i] = t;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
  return GaussRule{std::move(nodes), std::move(weights)};
}

Eigen::VectorXd load_vector(const Mesh1D& mesh, const UnivariateFn& g,
                            const GaussRule& rule) {
  if (!g) throw std::invalid_argument("load_vector: missing function handle");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_nodes);
  const double half = 0.5 * mesh.h;
  for (int e = 0; e < mesh.n_elems; ++e) {
    const double mid = mesh.node(e) + half;
    double acc_left = 0.0;
    double acc_right = 0.0;
    for (int q = 0; q < rule.order(); ++q) {
      const double s = 0.5 * (rule.nodes[q] + 1.0);  // local coordinate in [0, 1]
      const double gv = g(mid + half * rule.nodes[q]) * rule.weights[q];
      acc_left += gv * (1.0 - s);
      acc_right += gv * s;
    }
    out[e] += half * acc_left;
    out[e + 1] += half * acc_right;
  }
  return out;
}

Eigen::VectorXd load_vector_deriv(const Mesh1D& mesh, const UnivariateFn& gprime,
                                  const GaussRule& rule) {
  if (!gprime) throw std::invalid_argument("load_vector_deriv: missing function handle");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_nodes);
  const double half = 0.5 * mesh.h;
  for (int e = 0; e < mesh.n_elems; ++e) {
    const double mid = mesh.node(e) + half;
    double acc = 0.0;
    for (int q = 0; q < rule.order(); ++q)
      acc += gprime(mid + half * rule.nodes[q]) * rule.weights[q];
    // Hat derivatives are constant -1/h and +1/h on the element.
    const double integral = half * acc;
    out[e] -= integral / mesh.h;
    out[e + 1] += integral / mesh.h;
  }
  return out;
}

Eigen::VectorXd interpolate(const Mesh1D& mesh, const UnivariateFn& g) {
  if (!g) throw std::invalid_argument("interpolate: missing function handle");
  Eigen::VectorXd out(mesh.n_nodes);
  for (int j = 0; j < mesh.n_nodes; ++j) out[j] = g(mesh.node(j));
  return out;
}

}  // namespace tritz

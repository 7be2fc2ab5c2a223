#include "tritz/dense_oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <stdexcept>

namespace tritz::oracle {

namespace {

constexpr std::int64_t kMaxDenseSize = 1'000'000;
constexpr std::int64_t kMaxSolveUnknowns = 4096;
constexpr std::int64_t kMaxQuadPoints = 10'000'000;

std::vector<int> shape_of(const std::vector<Mesh1D>& meshes) {
  std::vector<int> shape;
  shape.reserve(meshes.size());
  for (const auto& mesh : meshes) shape.push_back(mesh.n_nodes);
  return shape;
}

std::int64_t total_size(const std::vector<int>& shape) {
  std::int64_t n = 1;
  for (int s : shape) {
    n *= s;
    if (n > kMaxDenseSize) return -1;
  }
  return n;
}

void check_size(const std::vector<Mesh1D>& meshes) {
  if (total_size(shape_of(meshes)) < 0)
    throw std::invalid_argument("dense oracle: full tensor exceeds the size guard");
}

// Strides for row-major layout, dimension 0 slowest.
std::vector<std::int64_t> strides_of(const std::vector<int>& shape) {
  std::vector<std::int64_t> strides(shape.size());
  std::int64_t s = 1;
  for (int i = static_cast<int>(shape.size()) - 1; i >= 0; --i) {
    strides[static_cast<std::size_t>(i)] = s;
    s *= shape[static_cast<std::size_t>(i)];
  }
  return strides;
}

// Applies the symmetric tridiagonal matrix along one axis of the flat array.
std::vector<double> apply_axis(const std::vector<double>& in, const std::vector<int>& shape,
                               int axis, const SymTridiag& T) {
  const auto strides = strides_of(shape);
  const std::int64_t n = static_cast<std::int64_t>(in.size());
  const std::int64_t stride = strides[static_cast<std::size_t>(axis)];
  const int extent = shape[static_cast<std::size_t>(axis)];
  std::vector<double> out(in.size(), 0.0);
  for (std::int64_t idx = 0; idx < n; ++idx) {
    const int j = static_cast<int>((idx / stride) % extent);
    double v = T.diag[j] * in[static_cast<std::size_t>(idx)];
    if (j > 0) v += T.off[j - 1] * in[static_cast<std::size_t>(idx - stride)];
    if (j + 1 < extent) v += T.off[j] * in[static_cast<std::size_t>(idx + stride)];
    out[static_cast<std::size_t>(idx)] = v;
  }
  return out;
}

// Dense load tensor b[j1..jd] = sum_r w_r prod_i load_{r,i}[j_i].
std::vector<double> dense_load(const EllipticProblem& p, const std::vector<Mesh1D>& meshes) {
  const auto shape = shape_of(meshes);
  const std::int64_t n = total_size(shape);
  const GaussRule rule = gauss_rule(8);
  const int d = static_cast<int>(meshes.size());
  const int R = p.rhs.rank();
  std::vector<std::vector<Eigen::VectorXd>> loads(static_cast<std::size_t>(R));
  for (int r = 0; r < R; ++r)
    for (int i = 0; i < d; ++i)
      loads[static_cast<std::size_t>(r)].push_back(
          load_vector(meshes[static_cast<std::size_t>(i)], p.rhs.factor(r, i).value, rule));
  const auto strides = strides_of(shape);
  std::vector<double> b(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t idx = 0; idx < n; ++idx) {
    double v = 0.0;
    for (int r = 0; r < R; ++r) {
      double prod = p.rhs.weight(r);
      for (int i = 0; i < d; ++i) {
        const int j = static_cast<int>((idx / strides[static_cast<std::size_t>(i)]) %
                                       shape[static_cast<std::size_t>(i)]);
        prod *= loads[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)][j];
      }
      v += prod;
    }
    b[static_cast<std::size_t>(idx)] = v;
  }
  return b;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Kronecker-structured operator action: (sum_m A_m prod_{i != m} M_i + c prod_i M_i) w.
std::vector<double> apply_operator(const EllipticProblem& p,
                                   const std::vector<Mesh1D>& meshes,
                                   const std::vector<double>& w) {
  const auto shape = shape_of(meshes);
  const int d = static_cast<int>(meshes.size());
  std::vector<SymTridiag> mass, stiff;
  for (const auto& mesh : meshes) {
    mass.push_back(mass_matrix(mesh));
    stiff.push_back(stiffness_matrix(mesh));
  }
  std::vector<double> result(w.size(), 0.0);
  for (int m = 0; m < d; ++m) {
    std::vector<double> tmp = apply_axis(w, shape, m, stiff[static_cast<std::size_t>(m)]);
    for (int i = 0; i < d; ++i)
      if (i != m) tmp = apply_axis(tmp, shape, i, mass[static_cast<std::size_t>(i)]);
    for (std::size_t idx = 0; idx < result.size(); ++idx) result[idx] += tmp[idx];
  }
  std::vector<double> tmp = w;
  for (int i = 0; i < d; ++i) tmp = apply_axis(tmp, shape, i, mass[static_cast<std::size_t>(i)]);
  for (std::size_t idx = 0; idx < result.size(); ++idx)
    result[idx] += p.reaction * tmp[idx];
  return result;
}

}  // namespace

DenseTensorFunction cp_to_dense(const CPFunction& u) {
  check_size(u.meshes());
  const auto shape = shape_of(u.meshes());
  const auto strides = strides_of(shape);
  const std::int64_t n = total_size(shape);
  const int d = u.dim();
  DenseTensorFunction w{u.meshes(), std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  for (std::int64_t idx = 0; idx < n; ++idx) {
    double v = 0.0;
    for (int k = 0; k < u.rank(); ++k) {
      double prod = 1.0;
      for (int i = 0; i < d; ++i) {
        const int j = static_cast<int>((idx / strides[static_cast<std::size_t>(i)]) %
                                       shape[static_cast<std::size_t>(i)]);
        prod *= u.block(i)(k, j);
      }
      v += prod;
    }
    w.coeffs[static_cast<std::size_t>(idx)] = v;
  }
  return w;
}

namespace {

struct HatValue {
  int element = 0;
  double left = 0.0;
  double right = 0.0;
};

HatValue hat_at(const Mesh1D& mesh, double x) {
  if (x < mesh.a || x > mesh.b)
    throw std::domain_error("dense oracle: point outside domain");
  int e = static_cast<int>((x - mesh.a) / mesh.h);
  if (e >= mesh.n_elems) e = mesh.n_elems - 1;
  const double s = (x - mesh.node(e)) / mesh.h;
  return {e, 1.0 - s, s};
}

}  // namespace

double evaluate(const DenseTensorFunction& w, std::span<const double> x) {
  const int d = w.dim();
  if (static_cast<int>(x.size()) != d)
    throw std::invalid_argument("dense evaluate: dimension mismatch");
  const auto shape = shape_of(w.meshes);
  const auto strides = strides_of(shape);
  // Sum over the 2^d corners of the containing cell.
  std::vector<HatValue> hats;
  hats.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) hats.push_back(hat_at(w.meshes[static_cast<std::size_t>(i)], x[i]));
  double sum = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double weight = 1.0;
    std::int64_t idx = 0;
    for (int i = 0; i < d; ++i) {
      const bool right = (corner >> i) & 1;
      const auto& hat = hats[static_cast<std::size_t>(i)];
      weight *= right ? hat.right : hat.left;
      idx += strides[static_cast<std::size_t>(i)] * (hat.element + (right ? 1 : 0));
    }
    sum += weight * w.coeffs[static_cast<std::size_t>(idx)];
  }
  return sum;
}

double evaluate_partial(const DenseTensorFunction& w, std::span<const double> x, int m) {
  const int d = w.dim();
  if (static_cast<int>(x.size()) != d)
    throw std::invalid_argument("dense evaluate_partial: dimension mismatch");
  if (m < 0 || m >= d) throw std::invalid_argument("dense evaluate_partial: bad axis");
  const auto shape = shape_of(w.meshes);
  const auto strides = strides_of(shape);
  std::vector<HatValue> hats;
  hats.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) hats.push_back(hat_at(w.meshes[static_cast<std::size_t>(i)], x[i]));
  const double dh = w.meshes[static_cast<std::size_t>(m)].h;
  double sum = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double weight = 1.0;
    std::int64_t idx = 0;
    for (int i = 0; i < d; ++i) {
      const bool right = (corner >> i) & 1;
      const auto& hat = hats[static_cast<std::size_t>(i)];
      if (i == m)
        weight *= right ? 1.0 / dh : -1.0 / dh;
      else
        weight *= right ? hat.right : hat.left;
      idx += strides[static_cast<std::size_t>(i)] * (hat.element + (right ? 1 : 0));
    }
    sum += weight * w.coeffs[static_cast<std::size_t>(idx)];
  }
  return sum;
}

double dense_energy(const EllipticProblem& p, const DenseTensorFunction& w) {
  if (p.dim != w.dim()) throw std::invalid_argument("dense_energy: dimension mismatch");
  check_size(w.meshes);
  const std::vector<double> kw = apply_operator(p, w.meshes, w.coeffs);
  const std::vector<double> b = dense_load(p, w.meshes);
  return 0.5 * dot(w.coeffs, kw) - dot(b, w.coeffs);
}

std::pair<DenseTensorFunction, double> dense_galerkin_solve(
    const EllipticProblem& p, const std::vector<Mesh1D>& meshes) {
  if (p.dim != static_cast<int>(meshes.size()))
    throw std::invalid_argument("dense_galerkin_solve: dimension mismatch");
  check_size(meshes);
  const auto shape = shape_of(meshes);
  const std::int64_t n = total_size(shape);
  if (n > kMaxSolveUnknowns)
    throw std::invalid_argument("dense_galerkin_solve: exceeds the unknown-count guard");
  const auto strides = strides_of(shape);
  const int d = static_cast<int>(meshes.size());

  std::vector<Eigen::MatrixXd> mass_dense, stiff_dense;
  for (const auto& mesh : meshes) {
    const SymTridiag m = mass_matrix(mesh);
    const SymTridiag a = stiffness_matrix(mesh);
    Eigen::MatrixXd md = Eigen::MatrixXd::Zero(mesh.n_nodes, mesh.n_nodes);
    Eigen::MatrixXd ad = Eigen::MatrixXd::Zero(mesh.n_nodes, mesh.n_nodes);
    for (int j = 0; j < mesh.n_nodes; ++j) {
      md(j, j) = m.diag[j];
      ad(j, j) = a.diag[j];
      if (j + 1 < mesh.n_nodes) {
        md(j, j + 1) = md(j + 1, j) = m.off[j];
        ad(j, j + 1) = ad(j + 1, j) = a.off[j];
      }
    }
    mass_dense.push_back(std::move(md));
    stiff_dense.push_back(std::move(ad));
  }

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> ji(static_cast<std::size_t>(d)), ni(static_cast<std::size_t>(d));
  for (std::int64_t row = 0; row < n; ++row) {
    for (int i = 0; i < d; ++i)
      ji[static_cast<std::size_t>(i)] =
          static_cast<int>((row / strides[static_cast<std::size_t>(i)]) %
                           shape[static_cast<std::size_t>(i)]);
    for (std::int64_t col = 0; col < n; ++col) {
      for (int i = 0; i < d; ++i)
        ni[static_cast<std::size_t>(i)] =
            static_cast<int>((col / strides[static_cast<std::size_t>(i)]) %
                             shape[static_cast<std::size_t>(i)]);
      double mass_prod = 1.0;
      for (int i = 0; i < d; ++i)
        mass_prod *= mass_dense[static_cast<std::size_t>(i)](
            ji[static_cast<std::size_t>(i)], ni[static_cast<std::size_t>(i)]);
      double value = p.reaction * mass_prod;
      for (int m = 0; m < d; ++m) {
        double prod = stiff_dense[static_cast<std::size_t>(m)](
            ji[static_cast<std::size_t>(m)], ni[static_cast<std::size_t>(m)]);
        for (int i = 0; i < d; ++i)
          if (i != m)
            prod *= mass_dense[static_cast<std::size_t>(i)](
                ji[static_cast<std::size_t>(i)], ni[static_cast<std::size_t>(i)]);
        value += prod;
      }
      K(row, col) = value;
    }
  }

  const std::vector<double> b = dense_load(p, meshes);
  Eigen::VectorXd bv(n);
  for (std::int64_t i = 0; i < n; ++i) bv[i] = b[static_cast<std::size_t>(i)];
  Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("dense_galerkin_solve: factorization failed");
  const Eigen::VectorXd x = ldlt.solve(bv);
  DenseTensorFunction w{meshes, std::vector<double>(static_cast<std::size_t>(n))};
  for (std::int64_t i = 0; i < n; ++i) w.coeffs[static_cast<std::size_t>(i)] = x[i];
  // At the minimizer the energy reduces to -1/2 b.x.
  const double min_energy = -0.5 * bv.dot(x);
  return {std::move(w), min_energy};
}

double tensorized_integral(const PointFn& integrand, const std::vector<Mesh1D>& meshes,
                           const GaussRule& rule) {
  if (!integrand) throw std::invalid_argument("tensorized_integral: missing integrand");
  const int d = static_cast<int>(meshes.size());
  std::int64_t points = 1;
  for (const auto& mesh : meshes) {
    points *= static_cast<std::int64_t>(mesh.n_elems) * rule.order();
    if (points > kMaxQuadPoints)
      throw std::invalid_argument("tensorized_integral: exceeds the quadrature-point guard");
  }
  // Odometer over (element, node) pairs per dimension, ascending order.
  std::vector<int> state(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  double total = 0.0;
  while (true) {
    double weight = 1.0;
    for (int i = 0; i < d; ++i) {
      const auto& mesh = meshes[static_cast<std::size_t>(i)];
      const int q = state[static_cast<std::size_t>(i)] % rule.order();
      const int e = state[static_cast<std::size_t>(i)] / rule.order();
      const double half = 0.5 * mesh.h;
      x[static_cast<std::size_t>(i)] = mesh.node(e) + half + half * rule.nodes[q];
      weight *= half * rule.weights[q];
    }
    total += weight * integrand(x);
    int i = d - 1;
    for (; i >= 0; --i) {
      const auto& mesh = meshes[static_cast<std::size_t>(i)];
      if (++state[static_cast<std::size_t>(i)] < mesh.n_elems * rule.order()) break;
      state[static_cast<std::size_t>(i)] = 0;
    }
    if (i < 0) break;
  }
  return total;
}

double tensorized_integral(const SeparableFunction& F, const std::vector<Mesh1D>& meshes,
                           const GaussRule& rule) {
  if (F.dim() != static_cast<int>(meshes.size()))
    throw std::invalid_argument("tensorized_integral: dimension mismatch");
  return tensorized_integral(
      [&F](std::span<const double> x) { return F.evaluate(x); }, meshes, rule);
}

}  // namespace tritz::oracle

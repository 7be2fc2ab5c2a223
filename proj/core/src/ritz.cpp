#include "tritz/ritz.hpp"

#include "block_assembly.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tritz {

namespace detail {

ProblemTables build_problem_tables(const EllipticProblem& p,
                                   const std::vector<Mesh1D>& meshes) {
  if (static_cast<int>(meshes.size()) != p.dim)
    throw std::invalid_argument("problem tables: dimension mismatch");
  if (p.rhs.dim() != p.dim)
    throw std::invalid_argument("problem tables: rhs dimension mismatch");
  ProblemTables tables;
  tables.reaction = p.reaction;
  const GaussRule rule = gauss_rule(8);
  const int d = p.dim;
  const int R = p.rhs.rank();
  tables.mass.reserve(static_cast<std::size_t>(d));
  tables.stiff.reserve(static_cast<std::size_t>(d));
  tables.load.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    tables.mass.push_back(mass_matrix(meshes[static_cast<std::size_t>(i)]));
    tables.stiff.push_back(stiffness_matrix(meshes[static_cast<std::size_t>(i)]));
    Eigen::MatrixXd b(R, meshes[static_cast<std::size_t>(i)].n_nodes);
    for (int r = 0; r < R; ++r)
      b.row(r) =
          load_vector(meshes[static_cast<std::size_t>(i)], p.rhs.factor(r, i).value, rule)
              .transpose();
    tables.load.push_back(std::move(b));
  }
  tables.weights.resize(static_cast<std::size_t>(R));
  for (int r = 0; r < R; ++r) tables.weights[static_cast<std::size_t>(r)] = p.rhs.weight(r);
  return tables;
}

void CPTables::rebuild(const CPFunction& u, const ProblemTables& tables) {
  const int d = u.dim();
  s.resize(static_cast<std::size_t>(d));
  t.resize(static_cast<std::size_t>(d));
  D.resize(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) update_dim(i, u, tables);
}

void CPTables::update_dim(int m, const CPFunction& u, const ProblemTables& tables) {
  const auto idx = static_cast<std::size_t>(m);
  const Eigen::MatrixXd& block = u.block(m);
  const Eigen::MatrixXd mb = tables.mass[idx].apply_rows(block);
  const Eigen::MatrixXd ab = tables.stiff[idx].apply_rows(block);
  s[idx] = block * mb.transpose();
  t[idx] = block * ab.transpose();
  D[idx] = block * tables.load[idx].transpose();
}

double energy_from_tables(const ProblemTables& tables, const CPTables& cp) {
  const int d = static_cast<int>(cp.s.size());
  const Eigen::Index P = cp.s.front().rows();
  const int R = static_cast<int>(tables.weights.size());
  std::vector<double> prefix(static_cast<std::size_t>(d) + 1);
  std::vector<double> suffix(static_cast<std::size_t>(d) + 1);
  double quad = 0.0;
  for (Eigen::Index k = 0; k < P; ++k) {
    for (Eigen::Index l = 0; l < P; ++l) {
      prefix[0] = 1.0;
      for (int i = 0; i < d; ++i)
        prefix[static_cast<std::size_t>(i) + 1] =
            prefix[static_cast<std::size_t>(i)] * cp.s[static_cast<std::size_t>(i)](k, l);
      suffix[static_cast<std::size_t>(d)] = 1.0;
      for (int i = d - 1; i >= 0; --i)
        suffix[static_cast<std::size_t>(i)] =
            suffix[static_cast<std::size_t>(i) + 1] * cp.s[static_cast<std::size_t>(i)](k, l);
      double h1 = 0.0;
      for (int m = 0; m < d; ++m)
        h1 += cp.t[static_cast<std::size_t>(m)](k, l) * prefix[static_cast<std::size_t>(m)] *
              suffix[static_cast<std::size_t>(m) + 1];
      quad += h1 + tables.reaction * prefix[static_cast<std::size_t>(d)];
    }
  }
  double lin = 0.0;
  for (Eigen::Index k = 0; k < P; ++k) {
    for (int r = 0; r < R; ++r) {
      double prod = tables.weights[static_cast<std::size_t>(r)];
      for (int i = 0; i < d; ++i) prod *= cp.D[static_cast<std::size_t>(i)](k, r);
      lin += prod;
    }
  }
  return 0.5 * quad - lin;
}

BlockQuadraticForm assemble_block(const ProblemTables& tables, const CPTables& cp, int m) {
  const int d = static_cast<int>(cp.s.size());
  if (m < 0 || m >= d) throw std::invalid_argument("block assembly: index out of range");
  const Eigen::Index P = cp.s.front().rows();
  const int R = static_cast<int>(tables.weights.size());

  BlockQuadraticForm q;
  q.dim_index = m;
  q.mass = tables.mass[static_cast<std::size_t>(m)];
  q.stiff = tables.stiff[static_cast<std::size_t>(m)];
  q.alpha.resize(P, P);
  q.beta.resize(P, P);

  std::vector<double> sv(static_cast<std::size_t>(d));
  std::vector<double> tv(static_cast<std::size_t>(d));
  std::vector<double> prefix(static_cast<std::size_t>(d) + 1);
  std::vector<double> suffix(static_cast<std::size_t>(d) + 1);
  for (Eigen::Index k = 0; k < P; ++k) {
    for (Eigen::Index l = 0; l < P; ++l) {
      // Collapse the excluded dimension by treating its factors as 1/0.
      for (int i = 0; i < d; ++i) {
        sv[static_cast<std::size_t>(i)] =
            (i == m) ? 1.0 : cp.s[static_cast<std::size_t>(i)](k, l);
        tv[static_cast<std::size_t>(i)] =
            (i == m) ? 0.0 : cp.t[static_cast<std::size_t>(i)](k, l);
      }
      prefix[0] = 1.0;
      for (int i = 0; i < d; ++i)
        prefix[static_cast<std::size_t>(i) + 1] =
            prefix[static_cast<std::size_t>(i)] * sv[static_cast<std::size_t>(i)];
      suffix[static_cast<std::size_t>(d)] = 1.0;
      for (int i = d - 1; i >= 0; --i)
        suffix[static_cast<std::size_t>(i)] =
            suffix[static_cast<std::size_t>(i) + 1] * sv[static_cast<std::size_t>(i)];
      const double alpha_kl = prefix[static_cast<std::size_t>(d)];
      double beta_kl = tables.reaction * alpha_kl;
      for (int pdim = 0; pdim < d; ++pdim)
        if (pdim != m)
          beta_kl += tv[static_cast<std::size_t>(pdim)] *
                     prefix[static_cast<std::size_t>(pdim)] *
                     suffix[static_cast<std::size_t>(pdim) + 1];
      q.alpha(k, l) = alpha_kl;
      q.beta(k, l) = beta_kl;
    }
  }

  // Linear term: g(k, :) = sum_r w_r (prod_{i != m} D[i](k, r)) load_m(r, :).
  Eigen::MatrixXd coeff(P, R);
  for (Eigen::Index k = 0; k < P; ++k) {
    for (int r = 0; r < R; ++r) {
      double prod = tables.weights[static_cast<std::size_t>(r)];
      for (int i = 0; i < d; ++i)
        if (i != m) prod *= cp.D[static_cast<std::size_t>(i)](k, r);
      coeff(k, r) = prod;
    }
  }
  q.g = coeff * tables.load[static_cast<std::size_t>(m)];
  return q;
}

}  // namespace detail

EllipticProblem make_cosine_problem(int dim) {
  if (dim < 1) throw std::invalid_argument("make_cosine_problem: dim must be >= 1");
  constexpr double pi = std::numbers::pi;
  EllipticProblem p{dim, pi * pi, SeparableFunction::cosine_sum(dim, 2.0 * pi * pi),
                    SeparableFunction::cosine_sum(dim, 1.0)};
  return p;
}

namespace {

void check_dims(const EllipticProblem& p, const CPFunction& u) {
  if (p.dim != u.dim()) throw std::invalid_argument("elliptic problem: dimension mismatch");
}

}  // namespace

double energy(const EllipticProblem& p, const CPFunction& u) {
  check_dims(p, u);
  const GramCache cache = gram_cache(u, u);
  return 0.5 * (inner_h1_semi(cache) + p.reaction * inner_l2(cache)) -
         inner_l2_sep(u, p.rhs);
}

std::vector<Eigen::MatrixXd> full_gradient(const EllipticProblem& p, const CPFunction& u) {
  check_dims(p, u);
  const detail::ProblemTables tables = detail::build_problem_tables(p, u.meshes());
  detail::CPTables cp;
  cp.rebuild(u, tables);
  std::vector<Eigen::MatrixXd> grad;
  grad.reserve(static_cast<std::size_t>(u.dim()));
  for (int m = 0; m < u.dim(); ++m) {
    const BlockQuadraticForm q = detail::assemble_block(tables, cp, m);
    grad.emplace_back(apply_block_hessian(q, u.block(m)) - q.g);
  }
  return grad;
}

BlockQuadraticForm block_quadratic(const EllipticProblem& p, const CPFunction& u, int m) {
  check_dims(p, u);
  if (m < 0 || m >= u.dim())
    throw std::invalid_argument("block_quadratic: index out of range");
  const detail::ProblemTables tables = detail::build_problem_tables(p, u.meshes());
  detail::CPTables cp;
  cp.rebuild(u, tables);
  return detail::assemble_block(tables, cp, m);
}

Eigen::MatrixXd apply_block_hessian(const BlockQuadraticForm& q, const Eigen::MatrixXd& X) {
  if (X.rows() != q.alpha.rows() || X.cols() != q.mass.size())
    throw std::invalid_argument("apply_block_hessian: shape mismatch");
  return q.alpha * q.stiff.apply_rows(X) + q.beta * q.mass.apply_rows(X);
}

double block_energy(const BlockQuadraticForm& q, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd hx = apply_block_hessian(q, X);
  return 0.5 * (X.array() * hx.array()).sum() - (q.g.array() * X.array()).sum();
}

}  // namespace tritz

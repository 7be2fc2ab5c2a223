#include "tritz/cp_function.hpp"

#include "tritz/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tritz {

CPFunction::CPFunction(std::vector<Mesh1D> meshes, int rank)
    : meshes_(std::move(meshes)), rank_(rank) {
  if (rank_ < 1) throw std::invalid_argument("CPFunction: rank must be >= 1");
  if (meshes_.empty()) throw std::invalid_argument("CPFunction: needs at least one mesh");
  factors_.reserve(meshes_.size());
  for (const auto& mesh : meshes_)
    factors_.emplace_back(Eigen::MatrixXd::Zero(rank_, mesh.n_nodes));
}

CPFunction CPFunction::zeros(std::vector<Mesh1D> meshes, int rank) {
  return CPFunction(std::move(meshes), rank);
}

CPFunction CPFunction::constant(std::vector<Mesh1D> meshes, int rank, double value) {
  CPFunction u(std::move(meshes), rank);
  for (int i = 0; i < u.dim(); ++i)
    u.factors_[static_cast<std::size_t>(i)].setConstant(value);
  return u;
}

CPFunction CPFunction::random_uniform(std::vector<Mesh1D> meshes, int rank,
                                      std::uint64_t seed) {
  CPFunction u(std::move(meshes), rank);
  SplitMix64 rng(seed);
  for (auto& block : u.factors_)
    for (Eigen::Index k = 0; k < block.rows(); ++k)
      for (Eigen::Index j = 0; j < block.cols(); ++j) block(k, j) = rng.next_centered();
  return u;
}

CPFunction CPFunction::nodal(std::vector<Mesh1D> meshes, int rank,
                             const SeparableFunction& F) {
  if (static_cast<int>(meshes.size()) != F.dim())
    throw std::invalid_argument("CPFunction::nodal: dimension mismatch");
  if (rank != F.rank())
    throw std::invalid_argument("CPFunction::nodal: rank must equal the function's rank");
  CPFunction u(std::move(meshes), rank);
  for (int k = 0; k < rank; ++k) {
    for (int i = 0; i < u.dim(); ++i) {
      Eigen::VectorXd values = interpolate(u.mesh(i), F.factor(k, i).value);
      if (i == 0) values *= F.weight(k);
      u.factors_[static_cast<std::size_t>(i)].row(k) = values.transpose();
    }
  }
  return u;
}

void CPFunction::set_block(int i, Eigen::MatrixXd X) {
  if (i < 0 || i >= dim()) throw std::invalid_argument("set_block: index out of range");
  auto& block = factors_[static_cast<std::size_t>(i)];
  if (X.rows() != block.rows() || X.cols() != block.cols())
    throw std::invalid_argument("set_block: shape mismatch");
  block = std::move(X);
}

std::int64_t CPFunction::parameter_count() const {
  std::int64_t total = 0;
  for (const auto& mesh : meshes_) total += mesh.n_nodes;
  return static_cast<std::int64_t>(rank_) * total;
}

bool CPFunction::same_meshes_as(const CPFunction& other) const {
  if (dim() != other.dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (!mesh(i).same_as(other.mesh(i))) return false;
  return true;
}

double CPFunction::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("CPFunction::evaluate: dimension mismatch");
  // Per-dimension value of every rank term; hats have two nonzero entries.
  Eigen::VectorXd term = Eigen::VectorXd::Ones(rank_);
  for (int i = 0; i < dim(); ++i) {
    const Mesh1D& mesh = meshes_[static_cast<std::size_t>(i)];
    const double xi = x[i];
    if (xi < mesh.a || xi > mesh.b)
      throw std::domain_error("CPFunction::evaluate: point outside domain");
    int e = static_cast<int>((xi - mesh.a) / mesh.h);
    if (e >= mesh.n_elems) e = mesh.n_elems - 1;
    const double s = (xi - mesh.node(e)) / mesh.h;
    const auto& block = factors_[static_cast<std::size_t>(i)];
    for (int k = 0; k < rank_; ++k)
      term[k] *= block(k, e) * (1.0 - s) + block(k, e + 1) * s;
  }
  double sum = 0.0;
  for (int k = 0; k < rank_; ++k) sum += term[k];
  return sum;
}

GramCache gram_cache(const CPFunction& u, const CPFunction& v) {
  if (!u.same_meshes_as(v))
    throw std::invalid_argument("gram_cache: functions must share meshes");
  GramCache cache;
  cache.s.reserve(static_cast<std::size_t>(u.dim()));
  cache.t.reserve(static_cast<std::size_t>(u.dim()));
  for (int i = 0; i < u.dim(); ++i) {
    const SymTridiag mass = mass_matrix(u.mesh(i));
    const SymTridiag stiff = stiffness_matrix(u.mesh(i));
    const Eigen::MatrixXd mv = mass.apply_rows(v.block(i));
    const Eigen::MatrixXd av = stiff.apply_rows(v.block(i));
    cache.s.emplace_back(u.block(i) * mv.transpose());
    cache.t.emplace_back(u.block(i) * av.transpose());
  }
  return cache;
}

double inner_l2(const GramCache& cache) {
  const Eigen::Index pu = cache.s.front().rows();
  const Eigen::Index pv = cache.s.front().cols();
  const int d = static_cast<int>(cache.s.size());
  double sum = 0.0;
  for (Eigen::Index k = 0; k < pu; ++k) {
    for (Eigen::Index l = 0; l < pv; ++l) {
      double prod = 1.0;
      for (int i = 0; i < d; ++i) prod *= cache.s[static_cast<std::size_t>(i)](k, l);
      sum += prod;
    }
  }
  return sum;
}

double inner_l2(const CPFunction& u, const CPFunction& v) {
  return inner_l2(gram_cache(u, v));
}

double inner_h1_semi(const GramCache& cache) {
  const Eigen::Index pu = cache.s.front().rows();
  const Eigen::Index pv = cache.s.front().cols();
  const int d = static_cast<int>(cache.s.size());
  std::vector<double> prefix(static_cast<std::size_t>(d) + 1);
  std::vector<double> suffix(static_cast<std::size_t>(d) + 1);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < pu; ++k) {
    for (Eigen::Index l = 0; l < pv; ++l) {
      prefix[0] = 1.0;
      for (int i = 0; i < d; ++i)
        prefix[static_cast<std::size_t>(i) + 1] =
            prefix[static_cast<std::size_t>(i)] * cache.s[static_cast<std::size_t>(i)](k, l);
      suffix[static_cast<std::size_t>(d)] = 1.0;
      for (int i = d - 1; i >= 0; --i)
        suffix[static_cast<std::size_t>(i)] =
            suffix[static_cast<std::size_t>(i) + 1] * cache.s[static_cast<std::size_t>(i)](k, l);
      for (int m = 0; m < d; ++m)
        sum += cache.t[static_cast<std::size_t>(m)](k, l) *
               prefix[static_cast<std::size_t>(m)] * suffix[static_cast<std::size_t>(m) + 1];
    }
  }
  return sum;
}

double inner_h1_semi(const CPFunction& u, const CPFunction& v) {
  return inner_h1_semi(gram_cache(u, v));
}

namespace {

void check_sep_compatible(const CPFunction& u, const SeparableFunction& F) {
  if (u.dim() != F.dim())
    throw std::invalid_argument("separable pairing: dimension mismatch");
}

// Load vectors of every separable factor on u's meshes: result[i] is R x N_i.
std::vector<Eigen::MatrixXd> factor_load_vectors(const CPFunction& u,
                                                 const SeparableFunction& F,
                                                 const GaussRule& rule) {
  std::vector<Eigen::MatrixXd> loads(static_cast<std::size_t>(u.dim()));
  for (int i = 0; i < u.dim(); ++i) {
    Eigen::MatrixXd b(F.rank(), u.mesh(i).n_nodes);
    for (int r = 0; r < F.rank(); ++r)
      b.row(r) = load_vector(u.mesh(i), F.factor(r, i).value, rule).transpose();
    loads[static_cast<std::size_t>(i)] = std::move(b);
  }
  return loads;
}

}  // namespace

double inner_l2_sep(const CPFunction& u, const SeparableFunction& F) {
  check_sep_compatible(u, F);
  const GaussRule rule = gauss_rule(8);
  const auto loads = factor_load_vectors(u, F, rule);
  double sum = 0.0;
  for (int k = 0; k < u.rank(); ++k) {
    for (int r = 0; r < F.rank(); ++r) {
      double prod = F.weight(r);
      for (int i = 0; i < u.dim(); ++i)
        prod *= u.block(i).row(k).dot(loads[static_cast<std::size_t>(i)].row(r));
      sum += prod;
    }
  }
  return sum;
}

double inner_h1_semi_sep(const CPFunction& u, const SeparableFunction& F) {
  check_sep_compatible(u, F);
  if (!F.has_derivatives())
    throw std::invalid_argument("inner_h1_semi_sep: missing derivative handle");
  const GaussRule rule = gauss_rule(8);
  const auto loads = factor_load_vectors(u, F, rule);
  std::vector<Eigen::MatrixXd> dloads(static_cast<std::size_t>(u.dim()));
  for (int m = 0; m < u.dim(); ++m) {
    Eigen::MatrixXd b(F.rank(), u.mesh(m).n_nodes);
    for (int r = 0; r < F.rank(); ++r)
      b.row(r) = load_vector_deriv(u.mesh(m), F.factor(r, m).deriv, rule).transpose();
    dloads[static_cast<std::size_t>(m)] = std::move(b);
  }
  double sum = 0.0;
  for (int k = 0; k < u.rank(); ++k) {
    for (int r = 0; r < F.rank(); ++r) {
      for (int m = 0; m < u.dim(); ++m) {
        double prod = F.weight(r) *
                      u.block(m).row(k).dot(dloads[static_cast<std::size_t>(m)].row(r));
        for (int i = 0; i < u.dim(); ++i)
          if (i != m)
            prod *= u.block(i).row(k).dot(loads[static_cast<std::size_t>(i)].row(r));
        sum += prod;
      }
    }
  }
  return sum;
}

CPFunction scale(const CPFunction& u, double c, int dim_index) {
  if (dim_index < 0 || dim_index >= u.dim())
    throw std::invalid_argument("scale: dimension index out of range");
  CPFunction result = u;
  result.set_block(dim_index, c * u.block(dim_index));
  return result;
}

CPFunction concat_add(const CPFunction& u, const CPFunction& v) {
  if (!u.same_meshes_as(v))
    throw std::invalid_argument("concat_add: functions must share meshes");
  CPFunction result(u.meshes(), u.rank() + v.rank());
  for (int i = 0; i < u.dim(); ++i) {
    Eigen::MatrixXd block(u.rank() + v.rank(), u.mesh(i).n_nodes);
    block.topRows(u.rank()) = u.block(i);
    block.bottomRows(v.rank()) = v.block(i);
    result.set_block(i, std::move(block));
  }
  return result;
}

Eigen::MatrixXd term_mass_norms(const CPFunction& u) {
  Eigen::MatrixXd norms(u.rank(), u.dim());
  for (int i = 0; i < u.dim(); ++i) {
    const SymTridiag mass = mass_matrix(u.mesh(i));
    const Eigen::MatrixXd mb = mass.apply_rows(u.block(i));
    for (int k = 0; k < u.rank(); ++k) {
      const double sq = u.block(i).row(k).dot(mb.row(k));
      norms(k, i) = std::sqrt(std::max(sq, 0.0));
    }
  }
  return norms;
}

CPFunction rebalance(const CPFunction& u) {
  const Eigen::MatrixXd norms = term_mass_norms(u);
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(static_cast<std::size_t>(u.dim()));
  for (int i = 0; i < u.dim(); ++i) blocks.push_back(u.block(i));
  for (int k = 0; k < u.rank(); ++k) {
    bool has_zero = false;
    double log_sum = 0.0;
    for (int i = 0; i < u.dim(); ++i) {
      if (norms(k, i) == 0.0) {
        has_zero = true;
        break;
      }
      log_sum += std::log(norms(k, i));
    }
    if (has_zero) continue;  // flagged for the solver's reseed pass
    const double target = std::exp(log_sum / u.dim());
    for (int i = 0; i < u.dim(); ++i)
      blocks[static_cast<std::size_t>(i)].row(k) *= target / norms(k, i);
  }
  CPFunction result(u.meshes(), u.rank());
  for (int i = 0; i < u.dim(); ++i)
    result.set_block(i, std::move(blocks[static_cast<std::size_t>(i)]));
  return result;
}

}  // namespace tritz

#include "tritz/separable.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tritz {

SeparableFunction::SeparableFunction(int dim, std::vector<double> weights,
                                     std::vector<std::vector<Univariate>> terms,
                                     double a, double b)
    : dim_(dim), weights_(std::move(weights)), terms_(std::move(terms)), a_(a), b_(b) {
  if (dim_ < 1) throw std::invalid_argument("SeparableFunction: dim must be >= 1");
  if (terms_.size() != weights_.size())
    throw std::invalid_argument("SeparableFunction: one weight per term required");
  if (!(a_ < b_)) throw std::invalid_argument("SeparableFunction: requires a < b");
  for (const auto& term : terms_)
    if (static_cast<int>(term.size()) != dim_)
      throw std::invalid_argument("SeparableFunction: every term needs dim factors");
}

bool SeparableFunction::has_derivatives() const {
  for (const auto& term : terms_)
    for (const auto& factor : term)
      if (!factor.deriv) return false;
  return true;
}

double SeparableFunction::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("SeparableFunction::evaluate: dimension mismatch");
  double sum = 0.0;
  for (int r = 0; r < rank(); ++r) {
    double prod = weights_[r];
    for (int i = 0; i < dim_; ++i) prod *= terms_[r][i].value(x[i]);
    sum += prod;
  }
  return sum;
}

SeparableFunction SeparableFunction::constant(int dim, double value) {
  std::vector<std::vector<Univariate>> terms(1);
  for (int i = 0; i < dim; ++i)
    terms[0].push_back({[](double) { return 1.0; }, [](double) { return 0.0; }});
  return SeparableFunction(dim, {value}, std::move(terms));
}

SeparableFunction SeparableFunction::cosine_sum(int dim, double coeff) {
  constexpr double pi = std::numbers::pi;
  std::vector<double> weights(dim, coeff);
  std::vector<std::vector<Univariate>> terms(dim);
  for (int r = 0; r < dim; ++r) {
    for (int i = 0; i < dim; ++i) {
      if (i == r)
        terms[r].push_back({[](double x) { return std::cos(pi * x); },
                            [](double x) { return -pi * std::sin(pi * x); }});
      else
        terms[r].push_back({[](double) { return 1.0; }, [](double) { return 0.0; }});
    }
  }
  return SeparableFunction(dim, std::move(weights), std::move(terms));
}

namespace {

double integrate_product(const Mesh1D& mesh, const UnivariateFn& f,
                         const UnivariateFn& g, const GaussRule& rule) {
  double total = 0.0;
  const double half = 0.5 * mesh.h;
  for (int e = 0; e < mesh.n_elems; ++e) {
    const double mid = mesh.node(e) + half;
    double acc = 0.0;
    for (int q = 0; q < rule.order(); ++q) {
      const double x = mid + half * rule.nodes[q];
      acc += f(x) * g(x) * rule.weights[q];
    }
    total += half * acc;
  }
  return total;
}

}  // namespace

SepNorms sep_norms(const SeparableFunction& F, int ref_elems) {
  if (ref_elems < 64) ref_elems = 64;
  const Mesh1D ref = build_mesh(F.domain_a(), F.domain_b(), ref_elems);
  const GaussRule rule = gauss_rule(8);
  const int R = F.rank();
  const int d = F.dim();
  const bool with_h1 = F.has_derivatives();

  // Per-pair, per-dimension 1D integrals of factor products.
  std::vector<std::vector<std::vector<double>>> i0(R), i1(R);
  for (int r = 0; r < R; ++r) {
    i0[r].resize(R);
    i1[r].resize(R);
    for (int s = 0; s < R; ++s) {
      i0[r][s].resize(d);
      i1[r][s].resize(d);
      for (int i = 0; i < d; ++i) {
        i0[r][s][i] = integrate_product(ref, F.factor(r, i).value, F.factor(s, i).value, rule);
        i1[r][s][i] = with_h1 ? integrate_product(ref, F.factor(r, i).deriv,
                                                  F.factor(s, i).deriv, rule)
                              : 0.0;
      }
    }
  }

  SepNorms norms;
  for (int r = 0; r < R; ++r) {
    for (int s = 0; s < R; ++s) {
      const double ws = F.weight(r) * F.weight(s);
      double mass_prod = 1.0;
      for (int i = 0; i < d; ++i) mass_prod *= i0[r][s][i];
      norms.l2_sq += ws * mass_prod;
      if (with_h1) {
        for (int m = 0; m < d; ++m) {
          double prod = i1[r][s][m];
          for (int i = 0; i < d; ++i)
            if (i != m) prod *= i0[r][s][i];
          norms.h1_semi_sq += ws * prod;
        }
      }
    }
  }
  return norms;
}

}  // namespace tritz

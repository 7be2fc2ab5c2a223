#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"
#include "tritz/cp_function.hpp"
#include "tritz/dense_oracle.hpp"
#include "tritz/ritz.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <numbers>

using namespace tritz;
using namespace tritz::testing;

constexpr double pi = std::numbers::pi;

namespace {

CPFunction random_cp(int dim, int n_elems, int rank, std::uint64_t seed) {
  return CPFunction::random_uniform(unit_meshes(dim, n_elems), rank, seed);
}

std::vector<double> random_point(int dim, SplitMix64& rng) {
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (auto& xi : x) xi = rng.next_double();
  return x;
}

}  // namespace

TEST_CASE("construction policies") {
  const auto meshes = unit_meshes(3, 4);

  const CPFunction zero = CPFunction::zeros(meshes, 2);
  auto rng = test_rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = random_point(3, rng);
    CHECK(zero.evaluate(x) == 0.0);
  }

  const CPFunction filled = CPFunction::constant(meshes, 2, 0.25);
  for (int i = 0; i < 3; ++i) CHECK((filled.block(i).array() == 0.25).all());

  CHECK_THROWS_AS(CPFunction::zeros(meshes, 0), std::invalid_argument);
}

TEST_CASE("nodal interpolation of the cosine sum hits the origin value") {
  for (int d : {2, 4}) {
    const SeparableFunction f = SeparableFunction::cosine_sum(d, 1.0);
    const CPFunction u = CPFunction::nodal(unit_meshes(d, 8), d, f);
    const std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
    CHECK(u.evaluate(origin) == doctest::Approx(static_cast<double>(d)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(
      CPFunction::nodal(unit_meshes(2, 4), 3, SeparableFunction::cosine_sum(2, 1.0)),
      std::invalid_argument);
}

TEST_CASE("random initialization is deterministic in the seed") {
  const CPFunction a = random_cp(3, 5, 4, 99);
  const CPFunction b = random_cp(3, 5, 4, 99);
  const CPFunction c = random_cp(3, 5, 4, 100);
  for (int i = 0; i < 3; ++i) {
    CHECK((a.block(i).array() == b.block(i).array()).all());
    CHECK((a.block(i).array() >= -0.5).all());
    CHECK((a.block(i).array() < 0.5).all());
  }
  CHECK((a.block(0).array() != c.block(0).array()).any());
}

TEST_CASE("evaluation reproduces constants and nodal products") {
  const CPFunction one = CPFunction::nodal(unit_meshes(2, 4), 1,
                                           SeparableFunction::constant(2, 1.0));
  auto rng = test_rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_point(2, rng);
    CHECK(one.evaluate(x) == doctest::Approx(1.0).epsilon(1e-14));
  }

  // prod_i x_i is rank one and nodal-exact at mesh nodes.
  std::vector<std::vector<Univariate>> terms(1);
  for (int i = 0; i < 3; ++i)
    terms[0].push_back({[](double x) { return x; }, [](double) { return 1.0; }});
  const SeparableFunction product(3, {1.0}, std::move(terms));
  const CPFunction u = CPFunction::nodal(unit_meshes(3, 2), 1, product);
  const std::array<double, 3> mid{0.5, 0.5, 0.5};
  CHECK(u.evaluate(mid) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("evaluation rejects out-of-domain points") {
  const CPFunction u = random_cp(2, 4, 2, 3);
  CHECK_THROWS_AS(u.evaluate(std::array<double, 2>{-0.1, 0.5}), std::domain_error);
  CHECK_THROWS_AS(u.evaluate(std::array<double, 2>{0.5, 1.2}), std::domain_error);
  CHECK_THROWS_AS(u.evaluate(std::array<double, 1>{0.5}), std::invalid_argument);
}

TEST_CASE("evaluation agrees with the dense expansion") {
  auto rng = test_rng(21);
  const CPFunction u = random_cp(2, 4, 3, 77);
  const auto dense = oracle::cp_to_dense(u);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_point(2, rng);
    CHECK(relative_diff(u.evaluate(x), oracle::evaluate(dense, x)) < 1e-13);
  }
}

TEST_CASE("gram cache of the constant one function") {
  for (int d : {1, 3, 5}) {
    const CPFunction one = CPFunction::constant(unit_meshes(d, 6), 1, 1.0);
    const GramCache cache = gram_cache(one, one);
    for (int i = 0; i < d; ++i) {
      CHECK(cache.s[i](0, 0) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::abs(cache.t[i](0, 0)) < 1e-13);
    }
  }
}

TEST_CASE("gram cache blocks are symmetric positive semidefinite") {
  const CPFunction u = random_cp(2, 6, 4, 13);
  const GramCache cache = gram_cache(u, u);
  for (int i = 0; i < 2; ++i) {
    CHECK((cache.s[i] - cache.s[i].transpose()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cache.s[i]);
    CHECK(eig.eigenvalues().minCoeff() > -1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_t(cache.t[i]);
    CHECK(eig_t.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("gram cache entries match 1D quadrature") {
  const CPFunction u = random_cp(2, 4, 2, 31);
  const CPFunction v = random_cp(2, 4, 2, 32);
  const GramCache cache = gram_cache(u, v);
  const GaussRule rule = gauss_rule(8);
  for (int i = 0; i < 2; ++i) {
    const Mesh1D& mesh = u.mesh(i);
    for (int k = 0; k < 2; ++k) {
      for (int l = 0; l < 2; ++l) {
        auto fu = [&](double x) {
          double s = 0.0;
          for (int j = 0; j < mesh.n_nodes; ++j) s += u.block(i)(k, j) * hat(mesh, j, x);
          return s;
        };
        auto fv = [&](double x) {
          double s = 0.0;
          for (int j = 0; j < mesh.n_nodes; ++j) s += v.block(i)(l, j) * hat(mesh, j, x);
          return s;
        };
        const double expected =
            integrate([&](double x) { return fu(x) * fv(x); }, 0.0, 1.0, mesh.n_elems, rule);
        CHECK(std::abs(cache.s[i](k, l) - expected) < 1e-13);
      }
    }
  }
  CHECK_THROWS_AS(gram_cache(u, random_cp(2, 5, 2, 33)), std::invalid_argument);
}

TEST_CASE("L2 inner product on reference cases") {
  const CPFunction one = CPFunction::constant(unit_meshes(5, 3), 1, 1.0);
  CHECK(inner_l2(one, one) == doctest::Approx(1.0).epsilon(1e-13));

  const SeparableFunction f = SeparableFunction::cosine_sum(2, 1.0);
  const CPFunction interp = CPFunction::nodal(unit_meshes(2, 4), 2, f);
  const auto meshes = interp.meshes();
  const double dense = oracle::tensorized_integral(
      [&](std::span<const double> x) {
        const double v = interp.evaluate(x);
        return v * v;
      },
      meshes, gauss_rule(8));
  CHECK(relative_diff(inner_l2(interp, interp), dense) < 1e-12);
}

TEST_CASE("inner products are symmetric and bilinear") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CPFunction u = random_cp(2, 5, 2, 100 + seed);
    const CPFunction v = random_cp(2, 5, 3, 200 + seed);
    const CPFunction w = random_cp(2, 5, 2, 300 + seed);
    CHECK(relative_diff(inner_l2(u, v), inner_l2(v, u)) < 1e-13);
    CHECK(relative_diff(inner_h1_semi(u, v), inner_h1_semi(v, u)) < 1e-13);
    const double lhs = inner_l2(concat_add(u, v), w);
    const double rhs = inner_l2(u, w) + inner_l2(v, w);
    CHECK(std::abs(lhs - rhs) < 1e-13 * std::max(1.0, std::abs(rhs)));
    const double lhs_h1 = inner_h1_semi(concat_add(u, v), w);
    const double rhs_h1 = inner_h1_semi(u, w) + inner_h1_semi(v, w);
    CHECK(std::abs(lhs_h1 - rhs_h1) < 1e-12 * std::max(1.0, std::abs(rhs_h1)));

    const SeparableFunction f = SeparableFunction::cosine_sum(2, 1.0);
    const double lhs_sep = inner_l2_sep(concat_add(u, v), f);
    const double rhs_sep = inner_l2_sep(u, f) + inner_l2_sep(v, f);
    CHECK(std::abs(lhs_sep - rhs_sep) < 1e-13 * std::max(1.0, std::abs(rhs_sep)));
  }
}

TEST_CASE("Cauchy-Schwarz holds for the L2 pairing") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CPFunction u = random_cp(3, 4, 2, 400 + seed);
    const CPFunction v = random_cp(3, 4, 2, 500 + seed);
    const double uv = inner_l2(u, v);
    CHECK(uv * uv <= inner_l2(u, u) * inner_l2(v, v) + 1e-12);
  }
}

TEST_CASE("H1 seminorm pairing basics") {
  const CPFunction one = CPFunction::constant(unit_meshes(3, 4), 1, 1.0);
  const CPFunction u = random_cp(3, 4, 2, 17);
  CHECK(std::abs(inner_h1_semi(u, one)) < 1e-12);
  CHECK(inner_h1_semi(u, u) >= 0.0);
}

TEST_CASE("separable L2 pairing on reference cases") {
  const CPFunction one = CPFunction::constant(unit_meshes(3, 4), 1, 1.0);
  CHECK(inner_l2_sep(one, SeparableFunction::constant(3, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-13));

  // cos(pi x_1) * 1 * 1 integrates to zero against the constant.
  std::vector<std::vector<Univariate>> terms(1);
  terms[0].push_back({[](double x) { return std::cos(pi * x); },
                      [](double x) { return -pi * std::sin(pi * x); }});
  for (int i = 1; i < 3; ++i)
    terms[0].push_back({[](double) { return 1.0; }, [](double) { return 0.0; }});
  const SeparableFunction cos_first(3, {1.0}, std::move(terms));
  CHECK(std::abs(inner_l2_sep(one, cos_first)) < 1e-13);

  const CPFunction u = random_cp(2, 4, 2, 55);
  const EllipticProblem p = make_cosine_problem(2);
  const double dense = oracle::tensorized_integral(
      [&](std::span<const double> x) { return u.evaluate(x) * p.rhs.evaluate(x); },
      u.meshes(), gauss_rule(8));
  CHECK(relative_diff(inner_l2_sep(u, p.rhs), dense) < 1e-12);
}

TEST_CASE("separable H1 pairing on reference cases") {
  const CPFunction u = random_cp(2, 5, 2, 66);
  CHECK(std::abs(inner_h1_semi_sep(u, SeparableFunction::constant(2, 3.0))) < 1e-12);

  const CPFunction one = CPFunction::constant(unit_meshes(2, 5), 1, 1.0);
  const SeparableFunction f = SeparableFunction::cosine_sum(2, 1.0);
  CHECK(std::abs(inner_h1_semi_sep(one, f)) < 1e-12);

  const auto dense_u = oracle::cp_to_dense(u);
  const double dense = oracle::tensorized_integral(
      [&](std::span<const double> x) {
        double acc = 0.0;
        for (int m = 0; m < 2; ++m) {
          const double df =
              (m == 0 ? -pi * std::sin(pi * x[0]) : -pi * std::sin(pi * x[1]));
          acc += oracle::evaluate_partial(dense_u, x, m) * df;
        }
        return acc;
      },
      u.meshes(), gauss_rule(8));
  CHECK(relative_diff(inner_h1_semi_sep(u, f), dense) < 1e-12);

  std::vector<std::vector<Univariate>> no_deriv(1);
  no_deriv[0].push_back({[](double x) { return x; }, nullptr});
  no_deriv[0].push_back({[](double) { return 1.0; }, [](double) { return 0.0; }});
  const SeparableFunction broken(2, {1.0}, std::move(no_deriv));
  CHECK_THROWS_AS(inner_h1_semi_sep(u, broken), std::invalid_argument);
}

TEST_CASE("separable norms of the cosine family") {
  for (int d : {2, 3, 5}) {
    const SepNorms norms = sep_norms(SeparableFunction::cosine_sum(d, 1.0));
    CHECK(norms.l2_sq == doctest::Approx(d / 2.0).epsilon(1e-13));
    CHECK(norms.h1_semi_sq == doctest::Approx(d * pi * pi / 2.0).epsilon(1e-13));
  }
  const SepNorms f3 = sep_norms(SeparableFunction::cosine_sum(3, 2.0 * pi * pi));
  CHECK(std::sqrt(f3.l2_sq) ==
        doctest::Approx(2.0 * pi * pi * std::sqrt(1.5)).epsilon(1e-13));
}

TEST_CASE("pairings reject incompatible operands") {
  const CPFunction u = random_cp(2, 4, 2, 1);
  CHECK_THROWS_AS(inner_l2_sep(u, SeparableFunction::constant(3, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(inner_h1_semi_sep(u, SeparableFunction::cosine_sum(3, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(concat_add(u, random_cp(2, 5, 2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(scale(u, 2.0, 2), std::invalid_argument);
}

TEST_CASE("scaling and concatenation follow multilinearity") {
  auto rng = test_rng(8);
  const CPFunction u = random_cp(3, 4, 2, 70);
  const CPFunction doubled = scale(u, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = random_point(3, rng);
    CHECK(doubled.evaluate(x) == doctest::Approx(2.0 * u.evaluate(x)).epsilon(1e-13));
  }
  const CPFunction diff = concat_add(u, scale(u, -1.0));
  CHECK(std::abs(inner_l2(diff, diff)) < 1e-12);
}

TEST_CASE("rebalance preserves the function and equalizes norms") {
  const CPFunction u = random_cp(3, 5, 3, 80);
  const CPFunction balanced = rebalance(u);
  const CPFunction twice = rebalance(balanced);
  for (int i = 0; i < 3; ++i)
    CHECK((balanced.block(i) - twice.block(i)).cwiseAbs().maxCoeff() < 1e-15);

  const CPFunction skewed = scale(u, 1000.0, 1);
  const CPFunction fixed = rebalance(skewed);
  auto rng = test_rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_point(3, rng);
    CHECK(relative_diff(fixed.evaluate(x), skewed.evaluate(x)) < 1e-12);
  }
  const Eigen::MatrixXd norms = term_mass_norms(fixed);
  for (int k = 0; k < 3; ++k) {
    const double lo = norms.row(k).minCoeff();
    const double hi = norms.row(k).maxCoeff();
    CHECK((hi - lo) / hi < 1e-12);
  }

  // Terms with an exactly zero factor stay untouched.
  CPFunction with_dead = u;
  Eigen::MatrixXd block = with_dead.block(1);
  block.row(0).setZero();
  with_dead.set_block(1, block);
  const CPFunction after = rebalance(with_dead);
  CHECK((after.block(0).row(0) - with_dead.block(0).row(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(after.block(1).row(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parameter count matches the rank and node totals") {
  std::vector<Mesh1D> meshes{build_mesh(0, 1, 4), build_mesh(0, 1, 8), build_mesh(0, 1, 2)};
  const CPFunction u = CPFunction::zeros(meshes, 3);
  CHECK(u.parameter_count() == 3 * (5 + 9 + 3));
}

TEST_CASE("separable quadrature agrees with the dense oracle across sizes") {
  auto rng = test_rng(12345);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(rng.next() % 3);
    const int n_elems = 2 + static_cast<int>(rng.next() % 6);  // up to 8 nodes
    const int rank = 1 + static_cast<int>(rng.next() % 4);
    const CPFunction u = random_cp(d, n_elems, rank, rng.next());
    const CPFunction v = random_cp(d, n_elems, rank, rng.next());
    const EllipticProblem p = make_cosine_problem(d);
    const auto dense_u = oracle::cp_to_dense(u);
    const auto dense_v = oracle::cp_to_dense(v);
    const GaussRule rule = gauss_rule(8);

    const double l2_dense = oracle::tensorized_integral(
        [&](std::span<const double> x) {
          return oracle::evaluate(dense_u, x) * oracle::evaluate(dense_v, x);
        },
        u.meshes(), rule);
    CHECK(relative_diff(inner_l2(u, v), l2_dense) < 1e-12);

    const double h1_dense = oracle::tensorized_integral(
        [&](std::span<const double> x) {
          double acc = 0.0;
          for (int m = 0; m < d; ++m)
            acc += oracle::evaluate_partial(dense_u, x, m) *
                   oracle::evaluate_partial(dense_v, x, m);
          return acc;
        },
        u.meshes(), rule);
    CHECK(relative_diff(inner_h1_semi(u, v), h1_dense) < 1e-12);

    const double sep_dense = oracle::tensorized_integral(
        [&](std::span<const double> x) {
          return oracle::evaluate(dense_u, x) * p.rhs.evaluate(x);
        },
        u.meshes(), rule);
    CHECK(relative_diff(inner_l2_sep(u, p.rhs), sep_dense) < 1e-12);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"
#include "tritz/mesh.hpp"

#include <cmath>
#include <numbers>

using namespace tritz;
using namespace tritz::testing;

constexpr double pi = std::numbers::pi;

TEST_CASE("build_mesh fields and validation") {
  const Mesh1D m = build_mesh(0.0, 1.0, 2);
  CHECK(m.h == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.n_nodes == 3);
  CHECK(m.node(0) == 0.0);
  CHECK(m.node(2) == doctest::Approx(1.0));

  const Mesh1D fine = build_mesh(0.0, 1.0, 1024);
  CHECK(fine.h == doctest::Approx(1.0 / 1024).epsilon(1e-15));
  CHECK(fine.n_nodes == 1025);

  CHECK_THROWS_AS(build_mesh(0.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(1.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(2.0, 1.0, 4), std::invalid_argument);
}

TEST_CASE("mass matrix entries on two elements") {
  const SymTridiag m = mass_matrix(build_mesh(0.0, 1.0, 2));
  CHECK(m.diag[0] == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(m.diag[1] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(m.diag[2] == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(m.off[0] == doctest::Approx(1.0 / 12).epsilon(1e-15));
  CHECK(m.off[1] == doctest::Approx(1.0 / 12).epsilon(1e-15));
}

TEST_CASE("mass matrix entries sum to the interval length") {
  for (const auto& [a, b, n] : {std::tuple{0.0, 1.0, 2}, {0.0, 1.0, 17},
                                {-1.5, 2.5, 9}, {2.0, 7.0, 64}}) {
    const SymTridiag m = mass_matrix(build_mesh(a, b, n));
    const double total = m.diag.sum() + 2.0 * m.off.sum();
    CHECK(std::abs(total - (b - a)) < 1e-14 * std::max(1.0, b - a));
  }
}

TEST_CASE("mass matrix matches the per-element quadrature oracle") {
  const Mesh1D mesh = build_mesh(0.0, 1.0, 4);
  const SymTridiag m = mass_matrix(mesh);
  for (int j = 0; j < mesh.n_nodes; ++j) {
    CHECK(std::abs(m.diag[j] - gram_entry_oracle(mesh, j, j, false)) < 1e-14);
    if (j + 1 < mesh.n_nodes)
      CHECK(std::abs(m.off[j] - gram_entry_oracle(mesh, j, j + 1, false)) < 1e-14);
  }
}

TEST_CASE("stiffness matrix entries on two elements") {
  const SymTridiag a = stiffness_matrix(build_mesh(0.0, 1.0, 2));
  CHECK(a.diag[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(a.diag[1] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(a.diag[2] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(a.off[0] == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(a.off[1] == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("stiffness matrix annihilates constants") {
  for (int n : {1, 2, 7, 33, 128}) {
    const Mesh1D mesh = build_mesh(0.0, 1.0, n);
    const SymTridiag a = stiffness_matrix(mesh);
    const Eigen::VectorXd out = a.apply(Eigen::VectorXd::Ones(mesh.n_nodes));
    CHECK(out.cwiseAbs().maxCoeff() < 1e-14 * n);
  }
}

TEST_CASE("stiffness matrix matches the per-element quadrature oracle") {
  const Mesh1D mesh = build_mesh(0.0, 1.0, 3);
  const SymTridiag a = stiffness_matrix(mesh);
  for (int j = 0; j < mesh.n_nodes; ++j) {
    CHECK(std::abs(a.diag[j] - gram_entry_oracle(mesh, j, j, true)) < 1e-14 * a.diag[j]);
    if (j + 1 < mesh.n_nodes)
      CHECK(std::abs(a.off[j] - gram_entry_oracle(mesh, j, j + 1, true)) <
            1e-14 * std::abs(a.off[j]));
  }
}

TEST_CASE("mass matrix is positive definite on random vectors") {
  const Mesh1D mesh = build_mesh(0.0, 1.0, 12);
  const SymTridiag m = mass_matrix(mesh);
  auto rng = test_rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd v(mesh.n_nodes);
    for (int j = 0; j < mesh.n_nodes; ++j) v[j] = rng.next_centered();
    if (v.norm() == 0.0) continue;
    CHECK(m.quad_form(v, v) > 0.0);
  }
}

TEST_CASE("gauss rule endpoints of the order range") {
  const GaussRule one = gauss_rule(1);
  CHECK(one.nodes.size() == 1);
  CHECK(one.nodes[0] == 0.0);
  CHECK(one.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

  CHECK_THROWS_AS(gauss_rule(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_rule(17), std::invalid_argument);
}

TEST_CASE("gauss rule weights sum to two for all orders") {
  for (int order = 1; order <= 16; ++order) {
    const GaussRule rule = gauss_rule(order);
    CHECK(std::abs(rule.weights.sum() - 2.0) < 1e-14);
  }
}

TEST_CASE("gauss rule known nodes for orders two and three") {
  const GaussRule two = gauss_rule(2);
  CHECK(two.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(two.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(two.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

  const GaussRule three = gauss_rule(3);
  CHECK(three.nodes[1] == 0.0);
  CHECK(three.nodes[2] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-15));
  CHECK(three.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(three.weights[2] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("gauss rule polynomial exactness") {
  const GaussRule two = gauss_rule(2);
  double cubic = 0.0, quadratic = 0.0;
  for (int q = 0; q < 2; ++q) {
    cubic += two.weights[q] * std::pow(two.nodes[q], 3);
    quadratic += two.weights[q] * two.nodes[q] * two.nodes[q];
  }
  CHECK(std::abs(cubic) < 1e-15);
  CHECK(quadratic == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("gauss rules are exact through degree 2q-1") {
  auto rng = test_rng(77);
  for (int order : {4, 7, 12, 16}) {
    const GaussRule rule = gauss_rule(order);
    const int degree = 2 * order - 1;
    std::vector<double> coeffs(static_cast<std::size_t>(degree) + 1);
    for (auto& c : coeffs) c = rng.next_centered();
    // Analytic integral over [-1, 1]: odd powers vanish.
    double exact = 0.0;
    for (int k = 0; k <= degree; k += 2) exact += coeffs[static_cast<std::size_t>(k)] * 2.0 / (k + 1);
    double quad = 0.0;
    for (int q = 0; q < order; ++q) {
      double value = 0.0;
      for (int k = degree; k >= 0; --k) value = value * rule.nodes[q] + coeffs[static_cast<std::size_t>(k)];
      quad += rule.weights[q] * value;
    }
    CHECK(std::abs(quad - exact) < 1e-13);
  }
}

TEST_CASE("order-8 rule integrates the cosine to its vanishing mean") {
  const GaussRule rule = gauss_rule(8);
  const double value =
      integrate([](double x) { return std::cos(pi * x); }, 0.0, 1.0, 1, rule);
  CHECK(std::abs(value) < 1e-14);
}

TEST_CASE("load vector of the constant function") {
  for (int n : {2, 5, 16}) {
    const Mesh1D mesh = build_mesh(0.0, 1.0, n);
    const Eigen::VectorXd b = load_vector(mesh, [](double) { return 1.0; }, gauss_rule(4));
    CHECK(std::abs(b.sum() - 1.0) < 1e-14);
    CHECK(b[0] == doctest::Approx(mesh.h / 2).epsilon(1e-14));
    CHECK(b[n] == doctest::Approx(mesh.h / 2).epsilon(1e-14));
    for (int j = 1; j < n; ++j) CHECK(b[j] == doctest::Approx(mesh.h).epsilon(1e-14));
  }
}

TEST_CASE("load vector of the cosine matches a high-resolution oracle") {
  const Mesh1D mesh = build_mesh(0.0, 1.0, 4);
  const Eigen::VectorXd b =
      load_vector(mesh, [](double x) { return std::cos(pi * x); }, gauss_rule(8));
  const GaussRule fine = gauss_rule(10);
  for (int j = 0; j < mesh.n_nodes; ++j) {
    const double oracle = integrate(
        [&](double x) { return hat(mesh, j, x) * std::cos(pi * x); }, 0.0, 1.0, 64, fine);
    CHECK(std::abs(b[j] - oracle) < 1e-12);
  }
}

TEST_CASE("load vector of a hat reproduces a mass matrix column") {
  const Mesh1D mesh = build_mesh(0.0, 1.0, 6);
  const SymTridiag m = mass_matrix(mesh);
  const int n = 3;
  const Eigen::VectorXd b =
      load_vector(mesh, [&](double x) { return hat(mesh, n, x); }, gauss_rule(8));
  for (int j = 0; j < mesh.n_nodes; ++j) {
    double expected = 0.0;
    if (j == n) expected = m.diag[j];
    if (j + 1 == n) expected = m.off[j];
    if (j == n + 1) expected = m.off[n];
    CHECK(std::abs(b[j] - expected) < 1e-14);
  }
}

TEST_CASE("quadrature consistency on random cubics") {
  auto rng = test_rng(11);
  const Mesh1D mesh = build_mesh(0.0, 1.0, 5);
  const GaussRule exact = gauss_rule(8);  // exact for the degree-4 integrands
  for (int trial = 0; trial < 10; ++trial) {
    double c0 = rng.next_centered(), c1 = rng.next_centered();
    double c2 = rng.next_centered(), c3 = rng.next_centered();
    auto g = [=](double x) { return c0 + x * (c1 + x * (c2 + x * c3)); };
    for (int order : {3, 4, 5}) {
      const Eigen::VectorXd b = load_vector(mesh, g, gauss_rule(order));
      for (int j = 0; j < mesh.n_nodes; ++j) {
        const double reference = integrate(
            [&](double x) { return hat(mesh, j, x) * g(x); }, 0.0, 1.0, mesh.n_elems,
            exact);
        CHECK(std::abs(b[j] - reference) < 1e-13);
      }
    }
  }
}

TEST_CASE("derivative load vector basics") {
  const Mesh1D mesh = build_mesh(0.0, 1.0, 5);
  const GaussRule rule = gauss_rule(8);

  const Eigen::VectorXd zero = load_vector_deriv(mesh, [](double) { return 0.0; }, rule);
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);

  const Eigen::VectorXd ones = load_vector_deriv(mesh, [](double) { return 1.0; }, rule);
  CHECK(ones[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(ones[mesh.n_nodes - 1] == doctest::Approx(1.0).epsilon(1e-14));
  for (int j = 1; j + 1 < mesh.n_nodes; ++j) CHECK(std::abs(ones[j]) < 1e-14);
}

TEST_CASE("derivative load vector matches the quadrature oracle") {
  const Mesh1D mesh = build_mesh(0.0, 1.0, 8);
  const Eigen::VectorXd b = load_vector_deriv(
      mesh, [](double x) { return -pi * std::sin(pi * x); }, gauss_rule(8));
  const GaussRule fine = gauss_rule(10);
  for (int j = 0; j < mesh.n_nodes; ++j) {
    const double oracle = integrate(
        [&](double x) { return hat_deriv(mesh, j, x) * (-pi * std::sin(pi * x)); }, 0.0,
        1.0, 128, fine);
    CHECK(std::abs(b[j] - oracle) < 1e-12);
  }
}

TEST_CASE("nodal interpolation") {
  const Mesh1D mesh = build_mesh(0.0, 1.0, 2);
  const Eigen::VectorXd ones = interpolate(mesh, [](double) { return 1.0; });
  CHECK((ones.array() == 1.0).all());

  const Eigen::VectorXd linear = interpolate(mesh, [](double x) { return x; });
  CHECK(linear[0] == 0.0);
  CHECK(linear[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(linear[2] == doctest::Approx(1.0).epsilon(1e-15));

  const Eigen::VectorXd cosine = interpolate(mesh, [](double x) { return std::cos(pi * x); });
  CHECK(cosine[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(cosine[1]) < 1e-15);
  CHECK(cosine[2] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("tridiagonal apply agrees with the dense form") {
  const Mesh1D mesh = build_mesh(0.0, 2.0, 6);
  const SymTridiag m = mass_matrix(mesh);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(m.size(), m.size());
  for (Eigen::Index j = 0; j < m.size(); ++j) {
    dense(j, j) = m.diag[j];
    if (j + 1 < m.size()) dense(j, j + 1) = dense(j + 1, j) = m.off[j];
  }
  auto rng = test_rng(5);
  Eigen::VectorXd v(m.size());
  for (Eigen::Index j = 0; j < m.size(); ++j) v[j] = rng.next_centered();
  CHECK((m.apply(v) - dense * v).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::MatrixXd x(3, m.size());
  for (Eigen::Index k = 0; k < x.rows(); ++k)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(k, j) = rng.next_centered();
  CHECK((m.apply_rows(x) - x * dense).cwiseAbs().maxCoeff() < 1e-15);
}

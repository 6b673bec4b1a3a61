#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "rtb/approximator.hpp"
#include "rtb/patch_io.hpp"
#include "testkit.hpp"

using namespace rtb;

namespace {

RationalPatch table1() { return read_patch(RTB_FIXTURE_DIR "/table1.json").rational(); }

std::vector<double> column(const std::vector<double> &coords, int dim, int d) {
  std::vector<double> out;
  for (std::size_t i = d; i < coords.size(); i += dim) out.push_back(coords[i]);
  return out;
}

// <R_d, B^m_l>_alpha for scalar component d of R.
double oracle_rhs(const RationalPatch &R, int d, int m, MultiIndex l, const AlphaWeights &a) {
  const auto r = column(R.coords, R.dim, d);
  return testkit::oracle_inner_product(
      [&](double x1, double x2) { return testkit::eval_rational_net(R.degree, r, R.weights, x1, x2); },
      [&](double x1, double x2) { return testkit::bernstein(m, l.k1, l.k2, x1, x2); }, a, 80);
}

RationalPatch random_patch(std::mt19937 &gen, int n, int dim, bool equal_weights = false) {
  std::uniform_real_distribution<double> p(-2, 2), w(0.2, 3);
  std::vector<double> xs(theta_size(n) * dim), ws(theta_size(n));
  for (auto &x : xs) x = p(gen);
  const double w0 = w(gen);
  for (auto &x : ws) x = equal_weights ? w0 : w(gen);
  return {n, dim, xs, ws};
}

ControlMap random_prescribed(std::mt19937 &gen, int m, const ConstraintVector &c, int dim) {
  std::uniform_real_distribution<double> p(-2, 2);
  ControlMap g;
  for (auto k : index_sets(m, c).gamma) {
    std::vector<double> v(dim);
    for (auto &x : v) x = p(gen);
    g[k] = v;
  }
  return g;
}

}  // namespace

TEST_CASE("compute_u") {
  SUBCASE("degree zero source") {
    const RationalPatch R(0, 2, {1.5, -2.0}, {1.0});
    const AlphaWeights a(0.2, -0.3, 0.5);
    const auto I = integral_collection(0, R.weights, 4, {0, 0, 0}, a);
    for (auto l : theta(4)) {
      const auto u = compute_u(l, R, 4, I);
      CHECK(multinomial(4, l) * u[0] == doctest::Approx(1.5 * I.at(l)).epsilon(1e-14));
      CHECK(multinomial(4, l) * u[1] == doctest::Approx(-2.0 * I.at(l)).epsilon(1e-14));
    }
  }
  SUBCASE("equal weights against dense quadrature") {
    std::mt19937 gen(21);
    const auto R = random_patch(gen, 3, 1, true);
    const AlphaWeights a(-0.5, 0.3, 0.0);
    const auto I = integral_collection(3, R.weights, 4, {0, 0, 0}, a);
    for (auto l : theta(4))
      CHECK(compute_u(l, R, 4, I)[0] ==
            doctest::Approx(oracle_rhs(R, 0, 4, l, a) / multinomial(4, l)).epsilon(1e-10));
  }
  SUBCASE("Table 1 patch") {
    const auto R = table1();
    const AlphaWeights a(-0.5, -0.5, -0.5);
    const ConstraintVector c{1, 1, 1};
    const auto I = integral_collection(6, R.weights, 5, c, a);
    for (auto l : index_sets(5, c).omega) {
      const auto u = compute_u(l, R, 5, I);
      for (int d = 0; d < 3; ++d) {
        const double ref = oracle_rhs(R, d, 5, l, a);
        CHECK(std::abs(multinomial(5, l) * u[d] - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
      }
    }
  }
}

TEST_CASE("compute_v") {
  const AlphaWeights a(-0.5, 0.4, 1.0);
  const int m = 5;
  const ConstraintVector c{1, 1, 1};
  const auto sets = index_sets(m, c);
  ControlMap zero;
  for (auto k : sets.gamma) zero[k] = {0.0};
  for (auto l : sets.omega) CHECK(compute_v(l, zero, m, a, 1)[0] == 0.0);

  for (auto h : sets.gamma) {
    ControlMap g = zero;
    g[h] = {1.0};
    for (auto l : sets.omega)
      CHECK(multinomial(m, l) * compute_v(l, g, m, a, 1)[0] == doctest::Approx(gram_entry(m, a, h, l)).epsilon(1e-13));
  }

  SUBCASE("Table 1 boundary set") {
    const auto R = table1();
    const AlphaWeights am(-0.5, -0.5, -0.5);
    const auto g = boundary_constraints(R, 5, am);
    const MultiIndex l{1, 1};
    const auto v = compute_v(l, g, 5, am, 3);
    for (int d = 0; d < 3; ++d) {
      std::vector<double> net(theta_size(5), 0.0);
      for (const auto &[k, p] : g) net[theta_position(5, k)] = p[d];
      const double ref = testkit::oracle_inner_product(
          [&](double x1, double x2) { return testkit::eval_net(5, net, x1, x2); },
          [&](double x1, double x2) { return testkit::bernstein(5, 1, 1, x1, x2); }, am, 64);
      CHECK(multinomial(5, l) * v[d] == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("approximate: projection identities") {
  std::mt19937 gen(31);
  const AlphaWeights a(-0.5, -0.5, -0.5);
  const auto R = random_patch(gen, 4, 3, true);
  SUBCASE("m = n reproduces the net") {
    const auto res = approximate({R, 4, {0, 0, 0}, {}, a, {}});
    for (std::size_t i = 0; i < R.coords.size(); ++i) CHECK(std::abs(res.patch.coords[i] - R.coords[i]) <= 1e-10);
  }
  SUBCASE("m > n gives the elevated net") {
    const auto res = approximate({R, 6, {0, 0, 0}, {}, a, {}});
    for (int d = 0; d < 3; ++d) {
      const auto up = testkit::oracle_degree_elevate(4, column(R.coords, 3, d), 6);
      const auto got = column(res.patch.coords, 3, d);
      for (std::size_t i = 0; i < up.size(); ++i) CHECK(std::abs(got[i] - up[i]) <= 1e-10);
    }
  }
}

TEST_CASE("approximate: matches the direct normal-equations solve") {
  std::mt19937 gen(41);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 1 + int(gen() % 4), m = 2 + int(gen() % 4);
    ConstraintVector c;
    do {
      c = {int(gen() % 3), int(gen() % 3), int(gen() % 3)};
    } while (c.order() >= m);
    const AlphaWeights a(std::uniform_real_distribution<double>(-0.6, 1.0)(gen), 0.0, -0.5);
    const auto R = random_patch(gen, n, 1);
    const auto g = random_prescribed(gen, m, c, 1);
    const auto res = approximate({R, m, c, g, a, {}});
    std::vector<double> pres(theta_size(m), 0.0);
    for (const auto &[k, v] : g) pres[theta_position(m, k)] = v[0];
    const auto ref = testkit::oracle_constrained_ls(n, R.coords, R.weights, m, c, pres, a, 64);
    INFO("n=" << n << " m=" << m << " c=(" << c.c1 << "," << c.c2 << "," << c.c3 << ")");
    for (std::size_t i = 0; i < ref.size(); ++i)
      CHECK(std::abs(res.patch.coords[i] - ref[i]) <= 1e-8 * std::max(1.0, std::abs(ref[i])));
  }
}

TEST_CASE("approximate: residual is orthogonal to the free basis") {
  std::mt19937 gen(51);
  const AlphaWeights a(0.3, -0.5, 0.0);
  const ConstraintVector c{1, 0, 1};
  const int n = 3, m = 5;
  const auto R = random_patch(gen, n, 1);
  const auto g = random_prescribed(gen, m, c, 1);
  const auto P = approximate({R, m, c, g, a, {}}).patch;
  double norm = 0.0;
  for (double x : R.coords) norm = std::max(norm, std::abs(x));
  for (auto k : index_sets(m, c).omega) {
    const double ip = testkit::oracle_inner_product(
        [&](double x1, double x2) {
          return testkit::eval_rational_net(n, R.coords, R.weights, x1, x2) - testkit::eval_net(m, P.coords, x1, x2);
        },
        [&](double x1, double x2) { return testkit::bernstein(m, k.k1, k.k2, x1, x2); }, a, 64);
    CHECK(std::abs(ip) <= 1e-8 * norm);
  }
}

TEST_CASE("approximate: constraints, components, validation") {
  std::mt19937 gen(61);
  const AlphaWeights a(-0.5, -0.5, -0.5);
  const ConstraintVector c{1, 1, 1};
  const auto R = random_patch(gen, 3, 3);
  const auto g = random_prescribed(gen, 5, c, 3);
  const auto res = approximate({R, 5, c, g, a, {}});
  for (const auto &[k, v] : g)
    for (int d = 0; d < 3; ++d) CHECK(res.patch.point(k)[d] == v[d]);

  for (int d = 0; d < 3; ++d) {
    ControlMap gd;
    for (const auto &[k, v] : g) gd[k] = {v[d]};
    const auto one = approximate({R.component(d), 5, c, gd, a, {}});
    CHECK(column(res.patch.coords, 3, d) == one.patch.coords);
  }

  ControlMap missing = g;
  missing.erase(missing.begin());
  CHECK_THROWS_AS(approximate({R, 5, c, missing, a, {}}), std::invalid_argument);
  CHECK_THROWS_AS(approximate({R, 3, {1, 1, 1}, {}, a, {}}), std::invalid_argument);
  ControlMap extra = g;
  extra[{2, 2}] = {0, 0, 0};
  CHECK_THROWS_AS(approximate({R, 5, c, extra, a, {}}), std::invalid_argument);
}

TEST_CASE("error metrics") {
  std::mt19937 gen(71);
  const auto R = random_patch(gen, 3, 2, true);
  const PolynomialPatch P(3, 2, R.coords);
  CHECK(error_max(R, P, 50) <= 1e-14);

  const RationalPatch c0(0, 1, {2.0}, {0.7});
  const PolynomialPatch c1(0, 1, {3.0});
  CHECK(error_max(c0, c1, 10) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(error_grid(c0, c1, 2).size() == 6);
  CHECK_THROWS_AS(error_grid(c0, c1, 1), std::invalid_argument);
  CHECK(error_l2(c0, c1, {-0.5, -0.5, -0.5}) == doctest::Approx(1.0).epsilon(1e-13));

  const auto T = table1();
  const auto Q = approximate({T, 5, {0, 0, 0}, {}, {0, 0, 0}, {}}).patch;
  const auto s = error_grid(T, Q, 40, Execution::serial);
  const auto p = error_grid(T, Q, 40, Execution::parallel);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i].delta == p[i].delta);
}

TEST_CASE("L2 error decreases with the degree") {
  const auto R = table1();
  const AlphaWeights a(-0.5, -0.5, -0.5);
  double prev = 1e300;
  for (int m = 3; m <= 8; ++m) {
    const auto P = approximate({R, m, {0, 0, 0}, {}, a, {}}).patch;
    const double e = error_l2(R, P, a);
    INFO("m=" << m);
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("c1_constraints") {
  std::mt19937 gen(81);
  std::uniform_real_distribution<double> u(-1, 1);
  SUBCASE("equal first rows") {
    PolynomialPatch Q(4, 3);
    for (auto &x : Q.coords) x = u(gen);
    for (int i = 0; i < 4; ++i)
      for (int d = 0; d < 3; ++d) Q.point({i, 1})[d] = Q.point({i + 1, 0})[d];
    const auto g = c1_constraints(Q, 4);
    CHECK(g.size() == index_sets(4, {2, 0, 0}).gamma.size());
    for (int i = 0; i < 4; ++i)
      for (int d = 0; d < 3; ++d) CHECK(g.at({1, i})[d] == Q.point({i + 1, 0})[d]);
  }
  SUBCASE("cross-edge derivative continuity, m = 2") {
    // Neighbor on V1 = (1,0), V2 = (0,1), V3 = (0,0); constrained patch on
    // U1 = (2,-1), U2 = V1, U3 = V3, so u1 = -v2 and u2 = v1 + 2 v2.
    PolynomialPatch Q(2, 1);
    for (auto &x : Q.coords) x = u(gen);
    const auto g = c1_constraints(Q, 2);
    PolynomialPatch P(2, 1);
    for (const auto &[k, v] : g) P.point(k)[0] = v[0];
    P.point({2, 0})[0] = u(gen);  // free
    for (int s = 0; s < 20; ++s) {
      const double tau = (s + 0.5) / 20;
      // Derivative along v2 at the edge point v = (tau, 0).
      const double dq = testkit::d_dx2(2, Q.coords, tau, 0.0);
      const double dp = -testkit::d_dx1(2, P.coords, 0.0, tau) + 2 * testkit::d_dx2(2, P.coords, 0.0, tau);
      CHECK(dp == doctest::Approx(dq).epsilon(1e-12));
      CHECK(testkit::eval_net(2, P.coords, 0.0, tau) == doctest::Approx(testkit::eval_net(2, Q.coords, tau, 0.0)));
    }
  }
  CHECK_THROWS_AS(c1_constraints(PolynomialPatch(3, 1), 4), std::invalid_argument);
}

TEST_CASE("boundary_constrained_ls") {
  SUBCASE("polynomial curve is reproduced in elevated form") {
    // Cubic with unit weights, fitted at degree 5.
    const std::vector<double> pts{0, 1, 3, -1};
    const RationalCurve C{3, 1, pts, {1, 1, 1, 1}};
    const auto q = boundary_constrained_ls(C, 5, true, -0.5, -0.5);
    std::vector<double> up = pts;
    for (int d = 3; d < 5; ++d) {
      std::vector<double> next(d + 2);
      for (int i = 0; i <= d + 1; ++i)
        next[i] = (i > 0 ? i * up[i - 1] : 0.0) / (d + 1) + (i <= d ? (d + 1 - i) * up[i] : 0.0) / (d + 1);
      up.swap(next);
    }
    for (int i = 0; i <= 5; ++i) CHECK(std::abs(q[i] - up[i]) <= 1e-10);
  }
  SUBCASE("endpoints are interpolated exactly") {
    const auto R = table1();
    for (Edge e : {Edge::k1_zero, Edge::k2_zero, Edge::hypotenuse}) {
      const auto C = boundary_curve(R, e);
      const auto q = boundary_constrained_ls(C, 5, true, 0.0, 0.0);
      for (int d = 0; d < 3; ++d) {
        CHECK(q[d] == C.coords[d]);
        CHECK(q[5 * 3 + d] == C.coords[6 * 3 + d]);
      }
    }
    const auto g = boundary_constraints(R, 5, {-0.5, -0.5, -0.5});
    CHECK(g.size() == index_sets(5, {1, 1, 1}).gamma.size());
    const auto c0 = R.point({0, 0}), c1 = R.point({6, 0}), c2 = R.point({0, 6});
    for (int d = 0; d < 3; ++d) {
      CHECK(g.at({0, 0})[d] == c0[d]);
      CHECK(g.at({5, 0})[d] == c1[d]);
      CHECK(g.at({0, 5})[d] == c2[d]);
    }
  }
  SUBCASE("boundary curves agree with the patch edges") {
    const auto R = table1();
    for (double t : {0.1, 0.5, 0.83}) {
      const auto a = eval_curve(boundary_curve(R, Edge::k1_zero), t), b = eval_rational(R, {0.0, t});
      const auto c = eval_curve(boundary_curve(R, Edge::k2_zero), t), d = eval_rational(R, {t, 0.0});
      const auto e = eval_curve(boundary_curve(R, Edge::hypotenuse), t), f = eval_rational(R, {t, 1.0 - t});
      for (int i = 0; i < 3; ++i) {
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
        CHECK(c[i] == doctest::Approx(d[i]).epsilon(1e-13));
        CHECK(e[i] == doctest::Approx(f[i]).epsilon(1e-13));
      }
    }
  }
  CHECK_THROWS_AS(boundary_constrained_ls({1, 1, {0, 1}, {1, 1}}, 1, true, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(boundary_constrained_ls({1, 1, {0, 1}, {1, -1}}, 3, true, 0, 0), std::invalid_argument);
}

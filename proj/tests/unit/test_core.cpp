#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "rtb/core.hpp"
#include "testkit.hpp"

using namespace rtb;

namespace {

Point2 random_point(std::mt19937 &gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double a = u(gen), b = u(gen);
  if (a + b > 1.0) a = 1.0 - a, b = 1.0 - b;
  return {a, b};
}

}  // namespace

TEST_CASE("index sets") {
  SUBCASE("unconstrained degree 2") {
    const auto s = index_sets(2, {0, 0, 0});
    const std::vector<MultiIndex> expect{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {2, 0}};
    CHECK(s.theta == expect);
    CHECK(s.omega == expect);
    CHECK(s.gamma.empty());
  }
  SUBCASE("n = 11, c = (2,1,3)") {
    const auto s = index_sets(11, {2, 1, 3});
    CHECK(s.omega.size() == 21);
    for (auto k : s.omega) CHECK((k.k1 >= 2 && k.k2 >= 1 && k.order() <= 8));
  }
  SUBCASE("n = 5, c = (1,1,1) leaves the three boundary rows") {
    const auto s = index_sets(5, {1, 1, 1});
    for (auto k : s.gamma) CHECK((k.k1 == 0 || k.k2 == 0 || k.order() == 5));
    CHECK(s.gamma.size() == 15);
  }
  SUBCASE("rejects |c| >= n") {
    CHECK_THROWS_AS(index_sets(3, {1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(index_sets(3, {0, 0, 4}), std::invalid_argument);
  }
  SUBCASE("set algebra for random (n, c)") {
    std::mt19937 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 1 + int(gen() % 12);
      ConstraintVector c;
      do {
        c = {int(gen() % 4), int(gen() % 4), int(gen() % 4)};
      } while (c.order() >= n);
      const auto s = index_sets(n, c);
      CHECK(s.omega.size() + s.gamma.size() == s.theta.size());
      const int M = n - c.order();
      CHECK(s.omega.size() == std::size_t((M + 1) * (M + 2) / 2));
      IndexMap om(n, s.omega);
      for (auto k : s.gamma) CHECK(om.find(k) < 0);
    }
  }
}

TEST_CASE("lexicographic positions") {
  const auto t = theta(7);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(theta_position(7, t[i]) == i);
}

TEST_CASE("combinatorics") {
  CHECK(binomial(10, 3) == 120.0);
  CHECK(multinomial(4, {1, 2}) == 12.0);
  CHECK(pochhammer(0.5, 3) == doctest::Approx(0.5 * 1.5 * 2.5));
  CHECK(binomial(60, 30) == doctest::Approx(1.1826458156486e17).epsilon(1e-12));
}

TEST_CASE("bernstein_eval") {
  CHECK(bernstein_eval(3, {0, 0}, {0, 0}) == 1.0);
  CHECK(bernstein_eval(2, {1, 0}, {0.5, 0.25}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(bernstein_eval(2, {2, 1}, {0.1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(bernstein_eval(2, {1, 0}, {0.8, 0.3}), std::domain_error);
  CHECK_THROWS_AS(bernstein_eval(2, {1, 0}, {-0.1, 0.3}), std::domain_error);

  std::mt19937 gen(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_point(gen);
    for (int n = 0; n <= 12; ++n) {
      double s = 0.0;
      for (auto k : theta(n)) s += bernstein_eval(n, k, x);
      CHECK(std::abs(s - 1.0) <= 1e-13);
    }
  }
}

TEST_CASE("patch evaluation") {
  SUBCASE("constant net") {
    PolynomialPatch p(4, 3);
    for (std::size_t i = 0; i < theta_size(4); ++i) p.coords[i * 3 + 0] = 1, p.coords[i * 3 + 1] = -2, p.coords[i * 3 + 2] = 5;
    const auto v = eval_polynomial(p, {0.2, 0.3});
    CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(v[2] == doctest::Approx(5.0).epsilon(1e-15));
  }
  SUBCASE("corner reproduces the corner point") {
    PolynomialPatch p(3, 1, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    CHECK(eval_polynomial(p, {1, 0})[0] == p.point({3, 0})[0]);
    CHECK(eval_polynomial(p, {0, 1})[0] == p.point({0, 3})[0]);
    CHECK(eval_polynomial(p, {0, 0})[0] == p.point({0, 0})[0]);
  }
  SUBCASE("linear interpolation") {
    PolynomialPatch p(1, 1, {0, 1, 2});
    CHECK(eval_polynomial(p, {0.5, 0.5})[0] == doctest::Approx(1.5).epsilon(1e-15));
  }
  SUBCASE("degree zero rational") {
    RationalPatch r(0, 3, {1, 2, 3}, {0.7});
    const auto v = eval_rational(r, {0.3, 0.3});
    CHECK(v == std::vector<double>{1, 2, 3});
  }
  SUBCASE("equal weights match the polynomial evaluator") {
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(-2, 2);
    const int n = 6;
    std::vector<double> xs(theta_size(n));
    for (auto &x : xs) x = u(gen);
    PolynomialPatch p(n, 1, xs);
    RationalPatch r(n, 1, xs, std::vector<double>(theta_size(n), 1.7));
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = random_point(gen);
      CHECK(std::abs(eval_rational(r, x)[0] - eval_polynomial(p, x)[0]) <= 1e-14);
      CHECK(std::abs(eval_polynomial(p, x)[0] - testkit::eval_net(n, xs, x.x1, x.x2)) <= 1e-13);
    }
  }
  SUBCASE("rational evaluator agrees with direct form") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(-2, 2), w(0.2, 3);
    const int n = 5;
    std::vector<double> xs(theta_size(n)), ws(theta_size(n));
    for (auto &x : xs) x = u(gen);
    for (auto &x : ws) x = w(gen);
    RationalPatch r(n, 1, xs, ws);
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = random_point(gen);
      CHECK(eval_rational(r, x)[0] == doctest::Approx(testkit::eval_rational_net(n, xs, ws, x.x1, x.x2)).epsilon(1e-13));
    }
  }
  SUBCASE("invalid nets") {
    CHECK_THROWS_AS(PolynomialPatch(2, 1, {1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(RationalPatch(1, 1, {1, 2, 3}, {1, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(RationalPatch(1, 1, {1, 2, 3}, {1, 1}), std::invalid_argument);
  }
}

TEST_CASE("normalization constant") {
  CHECK(normalization_constant({0, 0, 0}) == doctest::Approx(2.0).epsilon(1e-15));
  const double expect = std::tgamma(1.5) / std::pow(std::tgamma(0.5), 3);
  CHECK(normalization_constant({-0.5, -0.5, -0.5}) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(expect == doctest::Approx(0.1591549430918953).epsilon(1e-14));
  for (AlphaWeights a : {AlphaWeights{0, 0, 0}, AlphaWeights{-0.5, 0.3, 1.2}, AlphaWeights{2, -0.7, 0}}) {
    const double one = testkit::oracle_inner_product([](double, double) { return 1.0; },
                                                     [](double, double) { return 1.0; }, a, 40);
    CHECK(one == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("gram_entry") {
  CHECK(gram_entry(1, {0, 0, 0}, {0, 0}, {0, 0}) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(gram_entry(0, {0.3, -0.2, 1.5}, {0, 0}, {0, 0}) == doctest::Approx(1.0).epsilon(1e-15));

  const AlphaWeights alpha(-0.5, 0.25, 1.0);
  const int m = 4;
  for (auto h : theta(m))
    for (auto l : theta(m)) {
      CHECK(gram_entry(m, alpha, h, l) == gram_entry(m, alpha, l, h));
      const double q = testkit::oracle_inner_product(
          [&](double a, double b) { return testkit::bernstein(m, h.k1, h.k2, a, b); },
          [&](double a, double b) { return testkit::bernstein(m, l.k1, l.k2, a, b); }, alpha, 40);
      CHECK(gram_entry(m, alpha, h, l) == doctest::Approx(q).epsilon(1e-12));
    }

  SUBCASE("positive definite over Omega") {
    for (int mm = 1; mm <= 6; ++mm)
      for (ConstraintVector c : {ConstraintVector{0, 0, 0}, ConstraintVector{1, 0, 0}, ConstraintVector{0, 1, 0}}) {
        if (c.order() >= mm) continue;
        const auto om = index_sets(mm, c).omega;
        std::vector<double> G(om.size() * om.size());
        for (std::size_t i = 0; i < om.size(); ++i)
          for (std::size_t j = 0; j < om.size(); ++j) G[i * om.size() + j] = gram_entry(mm, alpha, om[i], om[j]);
        double min_eig = 0;
        testkit::spd_inverse(G, om.size(), &min_eig);
        CHECK(min_eig > 0.0);
      }
  }
}

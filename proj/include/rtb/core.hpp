#pragma once

// Index sets, Bernstein evaluation and inner-product primitives over the
// standard triangle T = {(x1, x2) : x1, x2 >= 0, x1 + x2 <= 1}.

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace rtb {

struct MultiIndex {
  int k1 = 0;
  int k2 = 0;

  constexpr int order() const { return k1 + k2; }
  /// Third barycentric index for a patch of degree n.
  constexpr int third(int n) const { return n - k1 - k2; }

  friend constexpr auto operator<=>(const MultiIndex &, const MultiIndex &) = default;
};

constexpr MultiIndex operator+(MultiIndex a, MultiIndex b) { return {a.k1 + b.k1, a.k2 + b.k2}; }
constexpr MultiIndex operator-(MultiIndex a, MultiIndex b) { return {a.k1 - b.k1, a.k2 - b.k2}; }

struct ConstraintVector {
  int c1 = 0;
  int c2 = 0;
  int c3 = 0;

  constexpr int order() const { return c1 + c2 + c3; }
  friend constexpr bool operator==(const ConstraintVector &, const ConstraintVector &) = default;
};

/// Exponents of the Jacobi weight w(x) = A x1^a1 x2^a2 (1 - x1 - x2)^a3.
struct AlphaWeights {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;

  AlphaWeights() = default;
  AlphaWeights(double x1, double x2, double x3);

  double sum() const { return a1 + a2 + a3; }
  friend bool operator==(const AlphaWeights &, const AlphaWeights &) = default;
};

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;
};

// Position of k inside Theta_n under the lexicographic (k1, then k2) order.
constexpr std::size_t theta_position(int n, MultiIndex k) {
  return static_cast<std::size_t>(k.k1 * (n + 1) - k.k1 * (k.k1 - 1) / 2 + k.k2);
}

constexpr std::size_t theta_size(int n) { return static_cast<std::size_t>((n + 1) * (n + 2) / 2); }

constexpr bool in_theta(int n, MultiIndex k) { return k.k1 >= 0 && k.k2 >= 0 && k.order() <= n; }

bool in_omega(int n, const ConstraintVector &c, MultiIndex k);

/// Theta_n enumerated lexicographically.
std::vector<MultiIndex> theta(int n);

struct IndexSets {
  int degree = 0;
  ConstraintVector constraints;
  std::vector<MultiIndex> theta;
  std::vector<MultiIndex> omega;
  std::vector<MultiIndex> gamma;
};

/// Theta_n, Omega^c_n and Gamma^c_n. Requires |c| < n.
IndexSets index_sets(int n, const ConstraintVector &c);

/// Lookup from MultiIndex to position in an ordered subset of Theta_n.
class IndexMap {
 public:
  IndexMap(int n, std::span<const MultiIndex> indices);

  /// -1 when k is not in the subset.
  std::ptrdiff_t find(MultiIndex k) const;
  std::size_t at(MultiIndex k) const;
  std::size_t size() const { return count_; }

 private:
  int n_;
  std::size_t count_;
  std::vector<std::ptrdiff_t> slots_;
};

// Combinatorics. Incremental products; no factorial ratios.
double binomial(int n, int k);
/// n! / (k1! k2! (n - |k|)!)
double multinomial(int n, MultiIndex k);
/// Shifted factorial (a)_k = a (a + 1) ... (a + k - 1).
double pochhammer(double a, int k);

double normalization_constant(const AlphaWeights &alpha);

double bernstein_eval(int n, MultiIndex k, Point2 x);

/// <B^m_h, B^m_l>_alpha in closed form.
double gram_entry(int m, const AlphaWeights &alpha, MultiIndex h, MultiIndex l);

/// Control net over Theta_n; coordinates stored row-major as |Theta_n| x dim.
struct PolynomialPatch {
  int degree = 0;
  int dim = 1;
  std::vector<double> coords;

  PolynomialPatch() = default;
  PolynomialPatch(int degree, int dim);
  PolynomialPatch(int degree, int dim, std::vector<double> coords);

  std::span<double> point(MultiIndex k) { return {coords.data() + theta_position(degree, k) * dim, std::size_t(dim)}; }
  std::span<const double> point(MultiIndex k) const {
    return {coords.data() + theta_position(degree, k) * dim, std::size_t(dim)};
  }
  /// Scalar patch holding coordinate `component`.
  PolynomialPatch component(int component) const;
};

struct RationalPatch {
  int degree = 0;
  int dim = 1;
  std::vector<double> coords;
  std::vector<double> weights;

  RationalPatch() = default;
  RationalPatch(int degree, int dim, std::vector<double> coords, std::vector<double> weights);

  std::span<const double> point(MultiIndex k) const {
    return {coords.data() + theta_position(degree, k) * dim, std::size_t(dim)};
  }
  double weight(MultiIndex k) const { return weights[theta_position(degree, k)]; }
  RationalPatch component(int component) const;
};

/// Control points keyed by multi-index, e.g. the prescribed g_k over Gamma.
using ControlMap = std::map<MultiIndex, std::vector<double>>;

std::vector<double> eval_polynomial(const PolynomialPatch &p, Point2 x);
std::vector<double> eval_rational(const RationalPatch &p, Point2 x);

/// Throws std::domain_error unless x lies in T (up to a few ulps).
void check_in_triangle(Point2 x);

}  // namespace rtb

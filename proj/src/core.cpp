#include "rtb/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rtb {

namespace {

constexpr double kDomainSlack = 1e-14;

// Triangular de Casteljau on a net of `dim`-vectors. Each level replaces
// b_k by x1 b_{k+e1} + x2 b_{k+e2} + x3 b_k over Theta_{r-1}.
std::vector<double> de_casteljau(int n, int dim, std::span<const double> net, Point2 x) {
  const double x3 = 1.0 - x.x1 - x.x2;
  std::vector<double> cur(net.begin(), net.end());
  std::vector<double> next;
  for (int r = n; r > 0; --r) {
    next.assign(theta_size(r - 1) * dim, 0.0);
    for (int k1 = 0; k1 <= r - 1; ++k1) {
      for (int k2 = 0; k1 + k2 <= r - 1; ++k2) {
        const auto dst = theta_position(r - 1, {k1, k2}) * dim;
        const auto s1 = theta_position(r, {k1 + 1, k2}) * dim;
        const auto s2 = theta_position(r, {k1, k2 + 1}) * dim;
        const auto s3 = theta_position(r, {k1, k2}) * dim;
        for (int d = 0; d < dim; ++d)
          next[dst + d] = x.x1 * cur[s1 + d] + x.x2 * cur[s2 + d] + x3 * cur[s3 + d];
      }
    }
    cur.swap(next);
  }
  cur.resize(dim);
  return cur;
}

void check_net(int degree, int dim, std::size_t ncoords) {
  if (degree < 0) throw std::invalid_argument("patch degree must be nonnegative");
  if (dim < 1) throw std::invalid_argument("patch dimension must be positive");
  if (ncoords != theta_size(degree) * std::size_t(dim))
    throw std::invalid_argument("control net has " + std::to_string(ncoords) + " coordinates, expected " +
                                std::to_string(theta_size(degree) * dim));
}

}  // namespace

AlphaWeights::AlphaWeights(double x1, double x2, double x3) : a1(x1), a2(x2), a3(x3) {
  if (!(x1 > -1.0 && x2 > -1.0 && x3 > -1.0))
    throw std::invalid_argument("alpha components must exceed -1");
}

bool in_omega(int n, const ConstraintVector &c, MultiIndex k) {
  return k.k1 >= c.c1 && k.k2 >= c.c2 && k.order() <= n - c.c3;
}

std::vector<MultiIndex> theta(int n) {
  std::vector<MultiIndex> out;
  out.reserve(theta_size(n));
  for (int k1 = 0; k1 <= n; ++k1)
    for (int k2 = 0; k1 + k2 <= n; ++k2) out.push_back({k1, k2});
  return out;
}

IndexSets index_sets(int n, const ConstraintVector &c) {
  if (c.c1 < 0 || c.c2 < 0 || c.c3 < 0) throw std::invalid_argument("constraint components must be nonnegative");
  if (c.order() >= n)
    throw std::invalid_argument("constraints: |c| = " + std::to_string(c.order()) + " must be below degree " +
                                std::to_string(n));
  IndexSets sets;
  sets.degree = n;
  sets.constraints = c;
  sets.theta = theta(n);
  for (const auto &k : sets.theta) (in_omega(n, c, k) ? sets.omega : sets.gamma).push_back(k);
  return sets;
}

IndexMap::IndexMap(int n, std::span<const MultiIndex> indices)
    : n_(n), count_(indices.size()), slots_(theta_size(n), -1) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (!in_theta(n, indices[i])) throw std::invalid_argument("index outside Theta_n");
    slots_[theta_position(n, indices[i])] = static_cast<std::ptrdiff_t>(i);
  }
}

std::ptrdiff_t IndexMap::find(MultiIndex k) const {
  if (!in_theta(n_, k)) return -1;
  return slots_[theta_position(n_, k)];
}

std::size_t IndexMap::at(MultiIndex k) const {
  const auto i = find(k);
  if (i < 0)
    throw std::out_of_range("multi-index (" + std::to_string(k.k1) + "," + std::to_string(k.k2) +
                            ") not in index set");
  return static_cast<std::size_t>(i);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double multinomial(int n, MultiIndex k) { return binomial(n, k.k1) * binomial(n - k.k1, k.k2); }

double pochhammer(double a, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= a + i;
  return r;
}

double normalization_constant(const AlphaWeights &alpha) {
  return std::exp(std::lgamma(alpha.sum() + 3.0) - std::lgamma(alpha.a1 + 1.0) - std::lgamma(alpha.a2 + 1.0) -
                  std::lgamma(alpha.a3 + 1.0));
}

void check_in_triangle(Point2 x) {
  if (!(x.x1 >= -kDomainSlack && x.x2 >= -kDomainSlack && x.x1 + x.x2 <= 1.0 + kDomainSlack))
    throw std::domain_error("point (" + std::to_string(x.x1) + ", " + std::to_string(x.x2) +
                            ") lies outside the standard triangle");
}

double bernstein_eval(int n, MultiIndex k, Point2 x) {
  if (!in_theta(n, k)) throw std::invalid_argument("bernstein_eval: index outside Theta_n");
  check_in_triangle(x);
  const double x3 = 1.0 - x.x1 - x.x2;
  return multinomial(n, k) * std::pow(x.x1, k.k1) * std::pow(x.x2, k.k2) * std::pow(x3, k.third(n));
}

double gram_entry(int m, const AlphaWeights &alpha, MultiIndex h, MultiIndex l) {
  const int h3 = h.third(m), l3 = l.third(m);
  // Interleave numerator and denominator factors to keep the running value near 1.
  double r = multinomial(m, h) * multinomial(m, l);
  const double s = alpha.sum() + 3.0;
  int den = 0;
  auto divide_next = [&] { r /= s + den++; };
  for (int i = 0; i < h.k1 + l.k1; ++i, divide_next()) r *= alpha.a1 + 1.0 + i;
  for (int i = 0; i < h.k2 + l.k2; ++i, divide_next()) r *= alpha.a2 + 1.0 + i;
  for (int i = 0; i < h3 + l3; ++i, divide_next()) r *= alpha.a3 + 1.0 + i;
  return r;
}

PolynomialPatch::PolynomialPatch(int degree, int dim)
    : degree(degree), dim(dim), coords(theta_size(degree) * std::size_t(dim), 0.0) {
  check_net(degree, dim, coords.size());
}

PolynomialPatch::PolynomialPatch(int degree, int dim, std::vector<double> coords)
    : degree(degree), dim(dim), coords(std::move(coords)) {
  check_net(degree, dim, this->coords.size());
}

PolynomialPatch PolynomialPatch::component(int c) const {
  PolynomialPatch out(degree, 1);
  for (std::size_t i = 0; i < theta_size(degree); ++i) out.coords[i] = coords[i * dim + c];
  return out;
}

RationalPatch::RationalPatch(int degree, int dim, std::vector<double> coords, std::vector<double> weights)
    : degree(degree), dim(dim), coords(std::move(coords)), weights(std::move(weights)) {
  check_net(degree, dim, this->coords.size());
  if (this->weights.size() != theta_size(degree))
    throw std::invalid_argument("weights: expected " + std::to_string(theta_size(degree)) + " entries");
  for (std::size_t i = 0; i < this->weights.size(); ++i)
    if (!(this->weights[i] > 0.0) || !std::isfinite(this->weights[i]))
      throw std::invalid_argument("weights[" + std::to_string(i) + "] must be positive and finite");
}

RationalPatch RationalPatch::component(int c) const {
  std::vector<double> xs(theta_size(degree));
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = coords[i * dim + c];
  return RationalPatch(degree, 1, std::move(xs), weights);
}

std::vector<double> eval_polynomial(const PolynomialPatch &p, Point2 x) {
  check_in_triangle(x);
  return de_casteljau(p.degree, p.dim, p.coords, x);
}

std::vector<double> eval_rational(const RationalPatch &p, Point2 x) {
  check_in_triangle(x);
  // Rational de Casteljau: weights combine linearly, points as weighted means.
  const double x3 = 1.0 - x.x1 - x.x2;
  const int dim = p.dim;
  std::vector<double> pts = p.coords, w = p.weights, npts, nw;
  for (int r = p.degree; r > 0; --r) {
    npts.assign(theta_size(r - 1) * dim, 0.0);
    nw.assign(theta_size(r - 1), 0.0);
    for (int k1 = 0; k1 <= r - 1; ++k1)
      for (int k2 = 0; k1 + k2 <= r - 1; ++k2) {
        const auto dst = theta_position(r - 1, {k1, k2});
        const auto s1 = theta_position(r, {k1 + 1, k2});
        const auto s2 = theta_position(r, {k1, k2 + 1});
        const auto s3 = theta_position(r, {k1, k2});
        const double b1 = x.x1 * w[s1], b2 = x.x2 * w[s2], b3 = x3 * w[s3];
        const double ws = b1 + b2 + b3;
        nw[dst] = ws;
        for (int d = 0; d < dim; ++d)
          npts[dst * dim + d] = (b1 * pts[s1 * dim + d] + b2 * pts[s2 * dim + d] + b3 * pts[s3 * dim + d]) / ws;
      }
    pts.swap(npts);
    w.swap(nw);
  }
  pts.resize(dim);
  return pts;
}

}  // namespace rtb

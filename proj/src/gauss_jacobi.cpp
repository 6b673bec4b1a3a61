#include "gauss_jacobi.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace rtb::detail {

namespace {

GaussRule build(int n, double a, double b) {
  // Jacobi matrix of the monic P^(a,b) recurrence on [-1, 1].
  Eigen::VectorXd diag(n), off(n > 1 ? n - 1 : 0);
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    diag(k) = (k == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    off(k - 1) = (k == 1) ? std::sqrt(4.0 * (1.0 + a) * (1.0 + b) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0)))
                          : std::sqrt(4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw std::runtime_error("gauss_jacobi01: eigen solver failed");

  // Mapped to [0, 1] the total weight is B(a + 1, b + 1).
  const double mass = std::beta(a + 1.0, b + 1.0);
  GaussRule r;
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(0.5 * (1.0 + es.eigenvalues()(i)));
    const double v = es.eigenvectors()(0, i);
    r.weights.push_back(mass * v * v);
  }
  return r;
}

}  // namespace

GaussRule gauss_jacobi01(int order, double alpha, double beta) {
  if (order < 1) throw std::invalid_argument("gauss_jacobi01: order must be positive");
  if (!(alpha > -1.0 && beta > -1.0)) throw std::invalid_argument("gauss_jacobi01: exponents must exceed -1");
  static std::mutex mu;
  static std::map<std::tuple<int, double, double>, GaussRule> cache;
  std::lock_guard lock(mu);
  const auto key = std::make_tuple(order, alpha, beta);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build(order, alpha, beta)).first;
  return it->second;
}

}  // namespace rtb::detail

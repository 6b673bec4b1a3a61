#pragma once

// Adaptive two-level Chebyshev quadrature for the integrals
//   I_j = int_T w_alpha(x) B^N_j(x) / omega(x) dx,   j in Omega^c_N, N = n + m.

#include <span>
#include <stdexcept>
#include <vector>

#include "rtb/core.hpp"

namespace rtb {

/// S(x) = sum'_i gamma_i T_i(2x - 1), the first term halved on evaluation.
struct ChebyshevSeries {
  std::vector<double> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double operator()(double x) const;
};

/// s_j = 1/2 + 1/2 cos(j pi / M), j = 0..M.
std::vector<double> cheb_nodes(int M);

/// Interpolant through samples taken at cheb_nodes(M); M = size - 1 must be a
/// power of two, at least 8.
ChebyshevSeries cheb_interpolate(std::span<const double> samples);

/// int_0^1 (1 - x)^alpha x^beta S(x) dx.
double jacobi_cheb_integral(double alpha, double beta, const ChebyshevSeries &S);

/// w_i(t) = sum_j omega_{i,j} B^{n-i}_j(t) for i = 0..n. Weights over Theta_n, lexicographic.
std::vector<double> omega_star_slice(int n, std::span<const double> weights, double t);

/// sum_i w_i B^n_i(s) for a slice from omega_star_slice.
double omega_star_eval(std::span<const double> slice, double s);

/// omega(s, (1 - s) t).
double omega_star(int n, std::span<const double> weights, double s, double t);

enum class Execution { serial, parallel };

struct QuadratureOptions {
  double epsilon = 5e-16;
  int initial_outer = 32;  // M*
  int initial_inner = 32;  // M_k*
  int max_degree = 1 << 20;
  Execution execution = Execution::parallel;
};

struct QuadratureDiagnostics {
  int final_M = 0;
  std::vector<int> inner_M;  // M_k for k = 0..final_M
  int outer_doublings = 0;
  long inner_doublings = 0;
  long psi_evaluations = 0;
};

struct IntegralCollection {
  int N = 0;
  ConstraintVector c;
  std::vector<MultiIndex> indices;  // Omega^c_N, lexicographic
  std::vector<double> values;
  QuadratureDiagnostics diagnostics;

  double at(MultiIndex j) const;
};

/// Raised when a Chebyshev degree would exceed QuadratureOptions::max_degree.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Omega^c_N lexicographically; empty when |c| > N.
std::vector<MultiIndex> omega_indices(int N, const ConstraintVector &c);

/// All I_j for j in Omega^c_{n+m}. Requires |c| <= n + m.
IntegralCollection integral_collection(int n, std::span<const double> weights, int m, const ConstraintVector &c,
                                       const AlphaWeights &alpha, const QuadratureOptions &opts = {});

}  // namespace rtb

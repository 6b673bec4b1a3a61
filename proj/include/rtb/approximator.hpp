#pragma once

// Constrained least-squares polynomial approximation of a rational triangular
// Bezier patch, plus error metrics and generators for the prescribed points.

#include <optional>
#include <utility>
#include <vector>

#include "rtb/core.hpp"
#include "rtb/dual_bernstein.hpp"
#include "rtb/quadrature.hpp"

namespace rtb {

struct ApproximationProblem {
  RationalPatch source;
  int degree = 0;  // m
  ConstraintVector c;
  ControlMap prescribed;  // keys exactly Gamma^c_m
  AlphaWeights alpha;
  QuadratureOptions quadrature;
};

struct ApproximationResult {
  PolynomialPatch patch;
  QuadratureDiagnostics quadrature;
  double seconds = 0.0;
};

/// u_l = sum_{h in Theta_n} binom(n, h) / binom(n + m, h + l) omega_h r_h I_{h+l}.
std::vector<double> compute_u(MultiIndex l, const RationalPatch &source, int m, const IntegralCollection &I);

/// v_l = sum_{h in Gamma} binom(m, h) prod_i (alpha_i + 1)_{h_i + l_i} g_h / (|alpha| + 3)_{2m}.
std::vector<double> compute_v(MultiIndex l, const ControlMap &prescribed, int m, const AlphaWeights &alpha, int dim);

/// Best L2_alpha approximation of degree m with p_k = g_k on Gamma^c_m.
/// Throws std::invalid_argument on inconsistent input, QuadratureError from the integrals.
ApproximationResult approximate(const ApproximationProblem &problem);

struct ErrorSample {
  double x1 = 0.0;
  double x2 = 0.0;
  double delta = 0.0;
};

/// ||R(x) - P(x)|| at (i/G, j/G), i + j <= G, lexicographic in (i, j).
std::vector<ErrorSample> error_grid(const RationalPatch &R, const PolynomialPatch &P, int grid = 200,
                                    Execution ex = Execution::parallel);
double error_max(const RationalPatch &R, const PolynomialPatch &P, int grid = 200, Execution ex = Execution::parallel);

/// ||R - P||_{L2, alpha} by a tensor Gauss-Jacobi rule of the given order per direction.
double error_l2(const RationalPatch &R, const PolynomialPatch &P, const AlphaWeights &alpha, int order = 64);

/// Prescribed rows for c = (2,0,0) that join this patch C1 to `neighbor`:
///   g_(0,i) = q_(i,0),  g_(1,i) = q_(i+1,0) + (q_(i+1,0) - q_(i,1)).
ControlMap c1_constraints(const PolynomialPatch &neighbor, int m);

struct RationalCurve {
  int degree = 0;
  int dim = 1;
  std::vector<double> coords;  // (degree + 1) x dim
  std::vector<double> weights;
};

std::vector<double> eval_curve(const RationalCurve &c, double t);

/// Degree-m polynomial curve minimising int_0^1 (1-t)^au t^av |C(t) - Q(t)|^2 dt,
/// optionally interpolating C(0) and C(1). Returns (m + 1) x dim control points.
std::vector<double> boundary_constrained_ls(const RationalCurve &curve, int m, bool endpoints_fixed, double au,
                                            double av);

enum class Edge { k1_zero, k2_zero, hypotenuse };

/// Boundary curve of a patch: k1 = 0 (parameter x2), k2 = 0 (parameter x1),
/// hypotenuse (parameter x1).
RationalCurve boundary_curve(const RationalPatch &R, Edge edge);

/// g over Gamma^(1,1,1)_m from the three boundary approximations. Without an
/// explicit (au, av) each edge uses the pair of alpha components at its ends.
ControlMap boundary_constraints(const RationalPatch &R, int m, const AlphaWeights &alpha,
                                std::optional<std::pair<double, double>> uv = std::nullopt);

}  // namespace rtb

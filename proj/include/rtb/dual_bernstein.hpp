#pragma once

// Constrained dual bivariate Bernstein basis: Bezier coefficients of the
// duals, computed by three-term recurrences seeded from a Hahn-polynomial sum.

#include <span>
#include <vector>

#include "rtb/core.hpp"

namespace rtb {

/// Parameters of the Hahn polynomial h_l(t; a, b, M).
struct HahnParams {
  double a = 0.0;
  double b = 0.0;
  int M = 0;

  HahnParams(double a, double b, int M);
};

/// Recurrence coefficients of h_{l+1} = A_l(t) h_l + B_l h_{l-1}.
double hahn_recurrence_a(int l, double t, const HahnParams &p);
double hahn_recurrence_b(int l, const HahnParams &p);

/// h_l(t; a, b, M) by forward recurrence. Requires 0 <= l <= M.
double hahn_eval(int l, double t, const HahnParams &p);

/// sum_i gamma_i h_i(t) by Clenshaw's backward recurrence. Requires size(gamma) <= M + 1.
double clenshaw_hahn(std::span<const double> gamma, double t, const HahnParams &p);

/// Symmetric table e^k_l = <D^M_k, D^M_l>_mu of the unconstrained dual basis,
/// dense row-major over Theta_M in lexicographic order.
struct DualGramTable {
  int M = 0;
  AlphaWeights mu;
  std::vector<double> entries;

  std::size_t size() const { return theta_size(M); }
  double at(MultiIndex k, MultiIndex l) const { return entries[theta_position(M, k) * size() + theta_position(M, l)]; }
};

/// e^0_l, the first row of the table. Requires l in Theta_M.
double e_seed_row(int M, const AlphaWeights &mu, MultiIndex l);

/// Full e-table by the seed row and the two directional recurrences. O(M^4).
DualGramTable e_table(int M, const AlphaWeights &mu);

/// E^k_l(alpha, c, m) over Omega^c_m x Omega^c_m. This is the inverse of the
/// constrained Bernstein Gram matrix.
struct ETable {
  int m = 0;
  ConstraintVector c;
  AlphaWeights alpha;
  std::vector<MultiIndex> omega;
  std::vector<double> entries;

  std::size_t size() const { return omega.size(); }
  double operator()(std::size_t i, std::size_t j) const { return entries[i * omega.size() + j]; }
};

ETable E_table(int m, const AlphaWeights &alpha, const ConstraintVector &c);

}  // namespace rtb

#pragma once

#include <vector>

namespace rtb::detail {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch rule on [0, 1] for the weight (1 - x)^alpha x^beta.
GaussRule gauss_jacobi01(int order, double alpha, double beta);

}  // namespace rtb::detail

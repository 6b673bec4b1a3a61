#pragma once

// Patch files (JSON) and constraint files (text records "k1 k2 v...").
//
// Patch file layout:
//   {"degree": n, "dim": d,
//    "points": [{"k": [k1, k2], "p": [x, y, z], "w": 0.8}, ...]}
// "w" is either present on every entry (rational patch) or on none.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtb/core.hpp"

namespace rtb {

/// Malformed or inconsistent input; the message names the offending field.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PatchFile {
  int degree = 0;
  int dim = 0;
  std::vector<double> coords;   // lexicographic over Theta_n
  std::vector<double> weights;  // empty for a polynomial patch

  bool is_rational() const { return !weights.empty(); }
  /// Unit weights when the file carries none.
  RationalPatch rational() const;
  PolynomialPatch polynomial() const;
};

PatchFile parse_patch(const std::string &text);
PatchFile read_patch(const std::string &path);

void write_patch(std::ostream &os, const PolynomialPatch &p);
void write_patch(std::ostream &os, const RationalPatch &p);
void write_patch(const std::string &path, const PolynomialPatch &p);

/// Records must cover Gamma^c_m exactly, each with `dim` values.
ControlMap parse_constraints(std::istream &is, int m, const ConstraintVector &c, int dim);
ControlMap read_constraints(const std::string &path, int m, const ConstraintVector &c, int dim);
void write_constraints(std::ostream &os, const ControlMap &g);

/// 17 significant digits; reads back to the same double.
std::string format_double(double x);

}  // namespace rtb

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rtb::cli {

/// Runs one command line; returns the process exit code.
///   0 ok, 1 selftest failure, 2 parse/validation error, 3 quadrature failure.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace rtb::cli

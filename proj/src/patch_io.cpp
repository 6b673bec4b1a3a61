#include "rtb/patch_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rtb {

namespace {

using nlohmann::json;

std::string index_name(MultiIndex k) { return "(" + std::to_string(k.k1) + "," + std::to_string(k.k2) + ")"; }

double number(const json &v, const std::string &where) {
  if (!v.is_number()) throw FormatError(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw FormatError(where + ": not finite");
  return x;
}

int integer(const json &obj, const char *key) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) throw FormatError(std::string("\"") + key + "\": expected an integer");
  return obj[key].get<int>();
}

std::string slurp(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RationalPatch PatchFile::rational() const {
  return {degree, dim, coords, is_rational() ? weights : std::vector<double>(theta_size(degree), 1.0)};
}

PolynomialPatch PatchFile::polynomial() const {
  if (is_rational()) throw FormatError("expected a polynomial patch but the file carries weights");
  return {degree, dim, coords};
}

PatchFile parse_patch(const std::string &text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw FormatError(std::string("patch: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("patch: top level must be an object");
  PatchFile pf;
  pf.degree = integer(doc, "degree");
  pf.dim = integer(doc, "dim");
  if (pf.degree < 0) throw FormatError("\"degree\": must be nonnegative");
  if (pf.dim < 1) throw FormatError("\"dim\": must be positive");
  if (!doc.contains("points") || !doc["points"].is_array()) throw FormatError("\"points\": expected an array");

  const int n = pf.degree;
  const std::size_t count = theta_size(n);
  pf.coords.assign(count * pf.dim, 0.0);
  std::vector<double> w(count, 0.0);
  std::vector<char> seen(count, 0), has_w(count, 0);
  for (const auto &e : doc["points"]) {
    if (!e.is_object() || !e.contains("k") || !e["k"].is_array() || e["k"].size() != 2 || !e["k"][0].is_number_integer() ||
        !e["k"][1].is_number_integer())
      throw FormatError("points: every entry needs \"k\": [k1, k2]");
    const MultiIndex k{e["k"][0].get<int>(), e["k"][1].get<int>()};
    const std::string name = "point " + index_name(k);
    if (!in_theta(n, k)) throw FormatError(name + ": index outside degree " + std::to_string(n));
    const std::size_t pos = theta_position(n, k);
    if (seen[pos]) throw FormatError(name + ": duplicate entry");
    seen[pos] = 1;
    if (!e.contains("p") || !e["p"].is_array() || e["p"].size() != std::size_t(pf.dim))
      throw FormatError(name + ": \"p\" must hold " + std::to_string(pf.dim) + " coordinates");
    for (int d = 0; d < pf.dim; ++d) pf.coords[pos * pf.dim + d] = number(e["p"][d], name + " coordinate " + std::to_string(d));
    if (e.contains("w")) {
      w[pos] = number(e["w"], name + " weight");
      if (!(w[pos] > 0.0)) throw FormatError(name + ": weight must be positive");
      has_w[pos] = 1;
    }
  }
  for (int k1 = 0; k1 <= n; ++k1)
    for (int k2 = 0; k1 + k2 <= n; ++k2)
      if (!seen[theta_position(n, {k1, k2})]) throw FormatError("point " + index_name({k1, k2}) + ": missing");

  std::size_t with_w = 0;
  for (char h : has_w) with_w += h;
  if (with_w != 0 && with_w != count) {
    for (int k1 = 0; k1 <= n; ++k1)
      for (int k2 = 0; k1 + k2 <= n; ++k2)
        if (!has_w[theta_position(n, {k1, k2})]) throw FormatError("point " + index_name({k1, k2}) + ": missing weight");
  }
  if (with_w == count) pf.weights = std::move(w);
  return pf;
}

PatchFile read_patch(const std::string &path) { return parse_patch(slurp(path)); }

namespace {

void write_net(std::ostream &os, int n, int dim, const std::vector<double> &coords, const std::vector<double> *weights) {
  os << "{\n  \"degree\": " << n << ",\n  \"dim\": " << dim << ",\n  \"points\": [\n";
  std::size_t pos = 0;
  for (int k1 = 0; k1 <= n; ++k1)
    for (int k2 = 0; k1 + k2 <= n; ++k2, ++pos) {
      os << "    {\"k\": [" << k1 << ", " << k2 << "], \"p\": [";
      for (int d = 0; d < dim; ++d) os << (d ? ", " : "") << format_double(coords[pos * dim + d]);
      os << "]";
      if (weights) os << ", \"w\": " << format_double((*weights)[pos]);
      os << "}" << (pos + 1 < theta_size(n) ? "," : "") << "\n";
    }
  os << "  ]\n}\n";
}

}  // namespace

void write_patch(std::ostream &os, const PolynomialPatch &p) { write_net(os, p.degree, p.dim, p.coords, nullptr); }

void write_patch(std::ostream &os, const RationalPatch &p) { write_net(os, p.degree, p.dim, p.coords, &p.weights); }

void write_patch(const std::string &path, const PolynomialPatch &p) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  write_patch(out, p);
}

ControlMap parse_constraints(std::istream &is, int m, const ConstraintVector &c, int dim) {
  const auto gamma = index_sets(m, c).gamma;
  const std::set<MultiIndex> wanted(gamma.begin(), gamma.end());
  ControlMap g;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    MultiIndex k;
    if (!(ls >> k.k1)) continue;  // blank or comment
    const std::string where = "constraints line " + std::to_string(lineno);
    if (!(ls >> k.k2)) throw FormatError(where + ": expected \"k1 k2 v...\"");
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (!ls.eof()) throw FormatError(where + ": unreadable value");
    if (v.size() != std::size_t(dim))
      throw FormatError(where + ": index " + index_name(k) + " has " + std::to_string(v.size()) + " values, expected " +
                        std::to_string(dim));
    if (!wanted.count(k)) throw FormatError(where + ": index " + index_name(k) + " is not a constrained index");
    if (!g.emplace(k, std::move(v)).second) throw FormatError(where + ": duplicate index " + index_name(k));
  }
  for (auto k : gamma)
    if (!g.count(k)) throw FormatError("constraints: missing index " + index_name(k));
  return g;
}

ControlMap read_constraints(const std::string &path, int m, const ConstraintVector &c, int dim) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return parse_constraints(in, m, c, dim);
}

void write_constraints(std::ostream &os, const ControlMap &g) {
  for (const auto &[k, v] : g) {
    os << k.k1 << ' ' << k.k2;
    for (double x : v) os << ' ' << format_double(x);
    os << '\n';
  }
}

}  // namespace rtb

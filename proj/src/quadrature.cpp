#include "rtb/quadrature.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace rtb {

namespace {

bool is_power_of_two(int M) { return M > 0 && (M & (M - 1)) == 0; }

double cheb_node(int j, int M) { return 0.5 + 0.5 * std::cos(j * std::numbers::pi / M); }

// In-place REDFT00 of length M + 1. Plans are created once per size; FFTW's
// planner is not thread-safe but executing a finished plan is.
void redft00(std::vector<double> &x) {
  static std::mutex mu;
  static std::map<std::size_t, fftw_plan> plans;
  fftw_plan plan;
  {
    std::lock_guard lock(mu);
    auto it = plans.find(x.size());
    if (it == plans.end()) {
      std::vector<double> scratch(x.size());
      plan = fftw_plan_r2r_1d(static_cast<int>(x.size()), scratch.data(), scratch.data(), FFTW_REDFT00,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
      plans.emplace(x.size(), plan);
    } else {
      plan = it->second;
    }
  }
  fftw_execute_r2r(plan, x.data(), x.data());
}

// Tail-to-head ratio of the trailing coefficients.
bool converged(const std::vector<double> &g, double tol) {
  const int M = static_cast<int>(g.size()) - 1;
  double tail = 0.0, head = 1.0;
  for (int i = M - 3; i <= M; ++i) tail += std::abs(g[i]);
  for (int i = 0; i <= 3; ++i) head = std::max(head, std::abs(g[i]));
  return tail / head <= tol;
}

template <class F>
void for_each_index(int count, Execution ex, F &&f) {
#pragma omp parallel for schedule(dynamic) if (ex == Execution::parallel)
  for (int i = 0; i < count; ++i) f(i);
}

void check_options(const QuadratureOptions &o) {
  if (!(o.epsilon > 0.0)) throw std::invalid_argument("quadrature: epsilon must be positive");
  for (int M : {o.initial_outer, o.initial_inner})
    if (!is_power_of_two(M) || M < 8)
      throw std::invalid_argument("quadrature: initial degree " + std::to_string(M) + " is not a power of two >= 8");
  if (o.max_degree < o.initial_outer || o.max_degree < o.initial_inner)
    throw std::invalid_argument("quadrature: max_degree below the initial degree");
}

struct NodeResult {
  int Mk = 0;
  int doublings = 0;
  long evals = 0;
  bool ok = true;
  std::vector<double> W;  // J(c(j1), d(j1); S_{M_k}) per column
};

}  // namespace

double ChebyshevSeries::operator()(double x) const {
  if (coeffs.empty()) return 0.0;
  const double y = 2.0 * x - 1.0;
  double b1 = 0.0, b2 = 0.0;
  for (int k = degree(); k >= 1; --k) {
    const double b = coeffs[k] + 2.0 * y * b1 - b2;
    b2 = b1;
    b1 = b;
  }
  return 0.5 * coeffs[0] + y * b1 - b2;
}

std::vector<double> cheb_nodes(int M) {
  std::vector<double> s(M + 1);
  for (int j = 0; j <= M; ++j) s[j] = cheb_node(j, M);
  return s;
}

ChebyshevSeries cheb_interpolate(std::span<const double> samples) {
  const int M = static_cast<int>(samples.size()) - 1;
  if (!is_power_of_two(M) || M < 8)
    throw std::invalid_argument("cheb_interpolate: M = " + std::to_string(M) + " is not a power of two >= 8");
  std::vector<double> g(samples.begin(), samples.end());
  redft00(g);  // g_i = 2 sum''_j f_j cos(i j pi / M)
  for (int i = 0; i < M; ++i) g[i] /= M;
  g[M] /= 2.0 * M;
  return {std::move(g)};
}

namespace {

// J(alpha, beta, S) / B(alpha + 1, beta + 1) by backward recurrence.
double jacobi_cheb_ratio(double alpha, double beta, const ChebyshevSeries &S) {
  if (S.coeffs.empty()) return 0.0;
  const int M = S.degree();
  const double r = beta - alpha, u = alpha + beta + 1.0;
  double d1 = 0.0, d2 = 0.0;  // d_i, d_{i+1}
  for (int i = M; i >= 1; --i) {
    const double d0 = (2.0 * r * d1 + (i - u) * d2 - S.coeffs[i]) / (i + u);
    d2 = d1;
    d1 = d0;
  }
  return 0.5 * S.coeffs[0] - r * d1 + u * d2;
}

// jacobi_cheb_ratio for many exponent pairs sharing one series, swept
// together so the inner loop runs over the pairs.
void jacobi_cheb_ratio_batch(const ChebyshevSeries &S, std::span<const double> r, std::span<const double> u,
                             std::span<double> out) {
  const std::size_t n = r.size();
  thread_local std::vector<double> d1, d2;
  d1.assign(n, 0.0);
  d2.assign(n, 0.0);
  for (int i = S.degree(); i >= 1; --i) {
    const double ci = S.coeffs[i];
    for (std::size_t p = 0; p < n; ++p) {
      const double d0 = (2.0 * r[p] * d1[p] + (i - u[p]) * d2[p] - ci) / (i + u[p]);
      d2[p] = d1[p];
      d1[p] = d0;
    }
  }
  for (std::size_t p = 0; p < n; ++p) out[p] = 0.5 * S.coeffs[0] - r[p] * d1[p] + u[p] * d2[p];
}

}  // namespace

double jacobi_cheb_integral(double alpha, double beta, const ChebyshevSeries &S) {
  if (!(alpha > -1.0 && beta > -1.0)) throw std::invalid_argument("jacobi_cheb_integral: exponents must exceed -1");
  if (S.coeffs.empty()) return 0.0;
  return std::beta(alpha + 1.0, beta + 1.0) * jacobi_cheb_ratio(alpha, beta, S);
}

std::vector<double> omega_star_slice(int n, std::span<const double> weights, double t) {
  std::vector<double> w(n + 1), row;
  for (int i = 0; i <= n; ++i) {
    const std::size_t base = theta_position(n, {i, 0});
    row.assign(weights.begin() + base, weights.begin() + base + (n - i + 1));
    for (int r = n - i; r > 0; --r)
      for (int j = 0; j < r; ++j) row[j] = (1.0 - t) * row[j] + t * row[j + 1];
    w[i] = row[0];
  }
  return w;
}

double omega_star_eval(std::span<const double> slice, double s) {
  thread_local std::vector<double> b;
  b.assign(slice.begin(), slice.end());
  for (std::size_t r = b.size() - 1; r > 0; --r)
    for (std::size_t j = 0; j < r; ++j) b[j] = (1.0 - s) * b[j] + s * b[j + 1];
  return b[0];
}

double omega_star(int n, std::span<const double> weights, double s, double t) {
  return omega_star_eval(omega_star_slice(n, weights, t), s);
}

double IntegralCollection::at(MultiIndex j) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), j);
  if (it == indices.end() || *it != j)
    throw std::out_of_range("integral (" + std::to_string(j.k1) + "," + std::to_string(j.k2) + ") not in collection");
  return values[it - indices.begin()];
}

std::vector<MultiIndex> omega_indices(int N, const ConstraintVector &c) {
  std::vector<MultiIndex> out;
  for (int j1 = c.c1; j1 <= N - c.c2 - c.c3; ++j1)
    for (int j2 = c.c2; j2 <= N - c.c3 - j1; ++j2) out.push_back({j1, j2});
  return out;
}

IntegralCollection integral_collection(int n, std::span<const double> weights, int m, const ConstraintVector &c,
                                       const AlphaWeights &alpha, const QuadratureOptions &opts) {
  check_options(opts);
  if (n < 0 || m < 0) throw std::invalid_argument("integral_collection: negative degree");
  if (weights.size() != theta_size(n)) throw std::invalid_argument("integral_collection: weight count mismatch");
  for (double w : weights)
    if (!(w > 0.0 && std::isfinite(w))) throw std::invalid_argument("integral_collection: weights must be positive");
  const int N = n + m;
  if (c.c1 < 0 || c.c2 < 0 || c.c3 < 0 || c.order() > N)
    throw std::invalid_argument("integral_collection: constraint vector outside 0 <= |c| <= n + m");

  const int j1_lo = c.c1, j1_hi = N - c.c2 - c.c3;
  const int cols = j1_hi - j1_lo + 1;
  const double inner_tol = 16.0 * opts.epsilon, outer_tol = 256.0 * opts.epsilon;
  // Inner exponents per column j1: (1 - s)^(a2 + a3 + N - j1 + 1) s^(a1 + j1).
  std::vector<double> inner_beta(cols), inner_r(cols), inner_u(cols);
  for (int col = 0; col < cols; ++col) {
    const double a = alpha.a2 + alpha.a3 + N - (j1_lo + col) + 1.0, b = alpha.a1 + j1_lo + col;
    inner_beta[col] = std::beta(a + 1.0, b + 1.0);
    inner_r[col] = b - a;
    inner_u[col] = a + b + 1.0;
  }

  // Phase I at one outer node: adaptive inner series for psi_t, then W[t, j1].
  auto phase_one = [&](double t) {
    NodeResult res;
    const auto slice = omega_star_slice(n, weights, t);
    int Mk = opts.initial_inner;
    std::vector<double> f(Mk + 1);
    for (int j = 0; j <= Mk; ++j) f[j] = 1.0 / omega_star_eval(slice, cheb_node(j, Mk));
    res.evals += Mk + 1;
    ChebyshevSeries S = cheb_interpolate(f);
    while (!converged(S.coeffs, inner_tol)) {
      if (2 * Mk > opts.max_degree) {
        res.ok = false;
        res.Mk = Mk;
        return res;
      }
      std::vector<double> g(2 * Mk + 1);
      for (int j = 0; j <= Mk; ++j) g[2 * j] = f[j];
      for (int j = 1; j < 2 * Mk; j += 2) g[j] = 1.0 / omega_star_eval(slice, cheb_node(j, 2 * Mk));
      res.evals += Mk;
      Mk *= 2;
      ++res.doublings;
      f.swap(g);
      S = cheb_interpolate(f);
    }
    res.Mk = Mk;
    res.W.resize(cols);
    jacobi_cheb_ratio_batch(S, inner_r, inner_u, res.W);
    for (int col = 0; col < cols; ++col) res.W[col] *= inner_beta[col];
    return res;
  };

  IntegralCollection out;
  out.N = N;
  out.c = c;
  out.indices = omega_indices(N, c);
  auto &diag = out.diagnostics;

  auto fail = [&](const char *what, int M) {
    throw QuadratureError(std::string("quadrature: ") + what + " series not converged at degree " +
                          std::to_string(M) + " (cap " + std::to_string(opts.max_degree) + ")");
  };
  // Runs Phase I at the listed node indices of the current outer degree.
  auto run_nodes = [&](std::vector<NodeResult> &rows, int M, int first, int step) {
    const int count = (M - first) / step + 1;
    for_each_index(count, opts.execution, [&](int i) {
      const int k = first + i * step;
      rows[k] = phase_one(cheb_node(k, M));
    });
    for (int k = first; k <= M; k += step) {
      if (!rows[k].ok) fail("inner", rows[k].Mk);
      diag.psi_evaluations += rows[k].evals;
      diag.inner_doublings += rows[k].doublings;
    }
  };

  int M = opts.initial_outer;
  std::vector<NodeResult> rows(M + 1);
  run_nodes(rows, M, 0, 1);

  // Phase II: every column is tested at the current M; any failure doubles M
  // for all columns, re-running Phase I only at the new odd nodes.
  std::vector<ChebyshevSeries> outer(cols);
  for (;;) {
    std::vector<char> ok(cols);
    for_each_index(cols, opts.execution, [&](int col) {
      std::vector<double> w(M + 1);
      for (int k = 0; k <= M; ++k) w[k] = rows[k].W[col];
      outer[col] = cheb_interpolate(w);
      ok[col] = converged(outer[col].coeffs, outer_tol);
    });
    if (std::all_of(ok.begin(), ok.end(), [](char b) { return b != 0; })) break;
    if (2 * M > opts.max_degree) fail("outer", M);
    std::vector<NodeResult> grown(2 * M + 1);
    for (int k = 0; k <= M; ++k) grown[2 * k] = std::move(rows[k]);
    rows.swap(grown);
    M *= 2;
    ++diag.outer_doublings;
    run_nodes(rows, M, 1, 2);
  }

  diag.final_M = M;
  diag.inner_M.resize(M + 1);
  for (int k = 0; k <= M; ++k) diag.inner_M[k] = rows[k].Mk;

  // Step 9. Row offsets of each j1 block inside the lexicographic index list.
  const double A = normalization_constant(alpha);
  out.values.resize(out.indices.size());
  std::vector<std::size_t> offset(cols + 1, 0);
  for (int j1 = j1_lo; j1 <= j1_hi; ++j1) offset[j1 - j1_lo + 1] = offset[j1 - j1_lo] + (N - c.c3 - j1 - c.c2 + 1);
  for_each_index(cols, opts.execution, [&](int col) {
    const int j1 = j1_lo + col;
    const std::size_t len = offset[col + 1] - offset[col];
    std::vector<double> r(len), u(len), ratio(len);
    for (std::size_t p = 0; p < len; ++p) {
      const int j2 = c.c2 + int(p);
      const double a = alpha.a3 + N - j1 - j2, b = alpha.a2 + j2;
      r[p] = b - a;
      u[p] = a + b + 1.0;
    }
    jacobi_cheb_ratio_batch(outer[col], r, u, ratio);
    for (std::size_t p = 0; p < len; ++p) {
      const int j2 = c.c2 + int(p);
      const double a = alpha.a3 + N - j1 - j2, b = alpha.a2 + j2;
      out.values[offset[col] + p] = A * multinomial(N, {j1, j2}) * std::beta(a + 1.0, b + 1.0) * ratio[p];
    }
  });
  return out;
}

}  // namespace rtb

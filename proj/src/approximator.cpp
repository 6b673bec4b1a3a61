#include "rtb/approximator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "gauss_jacobi.hpp"

namespace rtb {

namespace {

struct Run {
  double start;
  int count;
};

// prod over runs of (start)_count divided by (den)_{total}, one factor of each
// per step so intermediate values stay near the final magnitude.
double interleaved_ratio(std::initializer_list<Run> runs, double den) {
  double r = 1.0;
  int i = 0;
  for (const Run &run : runs)
    for (int j = 0; j < run.count; ++j, ++i) r *= (run.start + j) / (den + i);
  return r;
}

std::string index_name(MultiIndex k) { return "(" + std::to_string(k.k1) + "," + std::to_string(k.k2) + ")"; }

std::vector<double> homogeneous_curve_point(const RationalCurve &c, double t) {
  // de Casteljau on (w r, w), then project.
  const int dim = c.dim;
  std::vector<double> h((c.degree + 1) * (dim + 1));
  for (int i = 0; i <= c.degree; ++i) {
    for (int d = 0; d < dim; ++d) h[i * (dim + 1) + d] = c.weights[i] * c.coords[i * dim + d];
    h[i * (dim + 1) + dim] = c.weights[i];
  }
  for (int r = c.degree; r > 0; --r)
    for (int i = 0; i < r; ++i)
      for (int d = 0; d <= dim; ++d)
        h[i * (dim + 1) + d] = (1.0 - t) * h[i * (dim + 1) + d] + t * h[(i + 1) * (dim + 1) + d];
  std::vector<double> p(dim);
  for (int d = 0; d < dim; ++d) p[d] = h[d] / h[dim];
  return p;
}

}  // namespace

std::vector<double> compute_u(MultiIndex l, const RationalPatch &source, int m, const IntegralCollection &I) {
  const int n = source.degree, dim = source.dim;
  const int l3 = l.third(m);
  std::vector<double> sum(dim, 0.0), comp(dim, 0.0);
  for (int h1 = 0; h1 <= n; ++h1)
    for (int h2 = 0; h1 + h2 <= n; ++h2) {
      const MultiIndex h{h1, h2};
      const double ratio =
          interleaved_ratio({{h1 + 1.0, l.k1}, {h2 + 1.0, l.k2}, {h.third(n) + 1.0, l3}}, n + 1.0);
      const double f = ratio * source.weight(h) * I.at(h + l);
      const auto r = source.point(h);
      for (int d = 0; d < dim; ++d) {
        // Kahan summation
        const double y = f * r[d] - comp[d];
        const double t = sum[d] + y;
        comp[d] = (t - sum[d]) - y;
        sum[d] = t;
      }
    }
  return sum;
}

std::vector<double> compute_v(MultiIndex l, const ControlMap &prescribed, int m, const AlphaWeights &alpha, int dim) {
  std::vector<double> v(dim, 0.0);
  const int l3 = l.third(m);
  for (const auto &[h, g] : prescribed) {
    const double f = multinomial(m, h) * interleaved_ratio({{alpha.a1 + 1.0, h.k1 + l.k1},
                                                            {alpha.a2 + 1.0, h.k2 + l.k2},
                                                            {alpha.a3 + 1.0, h.third(m) + l3}},
                                                           alpha.sum() + 3.0);
    for (int d = 0; d < dim; ++d) v[d] += f * g[d];
  }
  return v;
}

ApproximationResult approximate(const ApproximationProblem &pb) {
  const auto t0 = std::chrono::steady_clock::now();
  const int m = pb.degree, dim = pb.source.dim;
  if (m < 1) throw std::invalid_argument("approximate: degree must be positive");
  if (pb.c.c1 < 0 || pb.c.c2 < 0 || pb.c.c3 < 0 || pb.c.order() >= m)
    throw std::invalid_argument("approximate: constraints need 0 <= c_i and |c| < m");
  const auto sets = index_sets(m, pb.c);
  if (pb.prescribed.size() != sets.gamma.size())
    throw std::invalid_argument("approximate: prescribed points must cover the " + std::to_string(sets.gamma.size()) +
                                " constrained indices, got " + std::to_string(pb.prescribed.size()));
  for (auto k : sets.gamma) {
    auto it = pb.prescribed.find(k);
    if (it == pb.prescribed.end()) throw std::invalid_argument("approximate: missing prescribed point " + index_name(k));
    if (it->second.size() != std::size_t(dim))
      throw std::invalid_argument("approximate: prescribed point " + index_name(k) + " has wrong dimension");
  }

  const ETable E = E_table(m, pb.alpha, pb.c);
  const IntegralCollection I =
      integral_collection(pb.source.degree, pb.source.weights, m, pb.c, pb.alpha, pb.quadrature);

  const std::size_t no = sets.omega.size();
  std::vector<double> diff(no * dim), scale(no);
  for (std::size_t j = 0; j < no; ++j) {
    const MultiIndex l = sets.omega[j];
    const auto u = compute_u(l, pb.source, m, I);
    const auto v = compute_v(l, pb.prescribed, m, pb.alpha, dim);
    for (int d = 0; d < dim; ++d) diff[j * dim + d] = u[d] - v[d];
    scale[j] = multinomial(m, l);
  }

  ApproximationResult res;
  res.patch = PolynomialPatch(m, dim);
  for (const auto &[k, g] : pb.prescribed) std::copy(g.begin(), g.end(), res.patch.point(k).begin());
  for (std::size_t i = 0; i < no; ++i) {
    auto p = res.patch.point(sets.omega[i]);
    for (int d = 0; d < dim; ++d) {
      double s = 0.0;
      for (std::size_t j = 0; j < no; ++j) s += scale[j] * E(i, j) * diff[j * dim + d];
      p[d] = s;
    }
  }
  res.quadrature = I.diagnostics;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::vector<ErrorSample> error_grid(const RationalPatch &R, const PolynomialPatch &P, int grid, Execution ex) {
  if (grid < 2) throw std::invalid_argument("error_grid: grid density must be at least 2");
  if (R.dim != P.dim) throw std::invalid_argument("error_grid: dimension mismatch");
  std::vector<ErrorSample> out(theta_size(grid));
#pragma omp parallel for schedule(dynamic) if (ex == Execution::parallel)
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; i + j <= grid; ++j) {
      const Point2 x{double(i) / grid, double(j) / grid};
      const auto r = eval_rational(R, x);
      const auto p = eval_polynomial(P, x);
      double s = 0.0;
      for (int d = 0; d < R.dim; ++d) s += (r[d] - p[d]) * (r[d] - p[d]);
      out[theta_position(grid, {i, j})] = {x.x1, x.x2, std::sqrt(s)};
    }
  return out;
}

double error_max(const RationalPatch &R, const PolynomialPatch &P, int grid, Execution ex) {
  double worst = 0.0;
  for (const auto &e : error_grid(R, P, grid, ex)) worst = std::max(worst, e.delta);
  return worst;
}

double error_l2(const RationalPatch &R, const PolynomialPatch &P, const AlphaWeights &alpha, int order) {
  if (R.dim != P.dim) throw std::invalid_argument("error_l2: dimension mismatch");
  const auto rs = detail::gauss_jacobi01(order, alpha.a2 + alpha.a3 + 1.0, alpha.a1);
  const auto rt = detail::gauss_jacobi01(order, alpha.a3, alpha.a2);
  double sum = 0.0;
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j) {
      const Point2 x{rs.nodes[i], (1.0 - rs.nodes[i]) * rt.nodes[j]};
      const auto r = eval_rational(R, x);
      const auto p = eval_polynomial(P, x);
      double s = 0.0;
      for (int d = 0; d < R.dim; ++d) s += (r[d] - p[d]) * (r[d] - p[d]);
      sum += rs.weights[i] * rt.weights[j] * s;
    }
  return std::sqrt(normalization_constant(alpha) * sum);
}

ControlMap c1_constraints(const PolynomialPatch &neighbor, int m) {
  if (neighbor.degree != m)
    throw std::invalid_argument("c1_constraints: neighbor has degree " + std::to_string(neighbor.degree) +
                                ", expected " + std::to_string(m));
  if (m < 1) throw std::invalid_argument("c1_constraints: degree must be positive");
  ControlMap g;
  const int dim = neighbor.dim;
  for (int i = 0; i <= m; ++i) {
    const auto q = neighbor.point({i, 0});
    g[{0, i}] = std::vector<double>(q.begin(), q.end());
  }
  for (int i = 0; i < m; ++i) {
    const auto a = neighbor.point({i + 1, 0}), b = neighbor.point({i, 1});
    std::vector<double> v(dim);
    for (int d = 0; d < dim; ++d) v[d] = a[d] + (a[d] - b[d]);
    g[{1, i}] = std::move(v);
  }
  return g;
}

std::vector<double> eval_curve(const RationalCurve &c, double t) { return homogeneous_curve_point(c, t); }

std::vector<double> boundary_constrained_ls(const RationalCurve &curve, int m, bool endpoints_fixed, double au,
                                            double av) {
  const int dim = curve.dim, n = curve.degree;
  if (curve.weights.size() != std::size_t(n + 1) || curve.coords.size() != std::size_t((n + 1) * dim))
    throw std::invalid_argument("boundary_constrained_ls: curve arrays do not match its degree");
  for (double w : curve.weights)
    if (!(w > 0.0)) throw std::invalid_argument("boundary_constrained_ls: weights must be positive");
  if (!(au > -1.0 && av > -1.0)) throw std::invalid_argument("boundary_constrained_ls: exponents must exceed -1");
  if (m < (endpoints_fixed ? 2 : 0)) throw std::invalid_argument("boundary_constrained_ls: degree too small");

  std::vector<double> q((m + 1) * dim, 0.0);
  if (endpoints_fixed) {
    for (int d = 0; d < dim; ++d) {
      q[d] = curve.coords[d];
      q[m * dim + d] = curve.coords[n * dim + d];
    }
  }
  const int lo = endpoints_fixed ? 1 : 0, hi = endpoints_fixed ? m - 1 : m;
  const int k = hi - lo + 1;

  // <B^m_i, B^m_j> in closed form.
  auto gram = [&](int i, int j) {
    return binomial(m, i) * binomial(m, j) * std::beta(au + 2 * m - i - j + 1.0, av + i + j + 1.0);
  };
  // <C, B^m_i> by a Gauss-Jacobi rule that absorbs the endpoint singularities.
  const int order = std::max(64, 2 * (n + m));
  const auto rule = detail::gauss_jacobi01(order, au, av);
  std::vector<std::vector<double>> cvals(order);
  for (int s = 0; s < order; ++s) cvals[s] = homogeneous_curve_point(curve, rule.nodes[s]);

  Eigen::MatrixXd G(k, k);
  Eigen::MatrixXd rhs(k, dim);
  for (int a = 0; a < k; ++a) {
    const int i = lo + a;
    for (int b = 0; b < k; ++b) G(a, b) = gram(i, lo + b);
    for (int d = 0; d < dim; ++d) {
      double s = 0.0;
      for (int p = 0; p < order; ++p) {
        const double t = rule.nodes[p];
        s += rule.weights[p] * binomial(m, i) * std::pow(t, i) * std::pow(1.0 - t, m - i) * cvals[p][d];
      }
      if (endpoints_fixed) s -= gram(i, 0) * q[d] + gram(i, m) * q[m * dim + d];
      rhs(a, d) = s;
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::runtime_error("boundary_constrained_ls: normal matrix is not positive definite");
  const Eigen::MatrixXd sol = ldlt.solve(rhs);
  for (int a = 0; a < k; ++a)
    for (int d = 0; d < dim; ++d) q[(lo + a) * dim + d] = sol(a, d);
  return q;
}

RationalCurve boundary_curve(const RationalPatch &R, Edge edge) {
  const int n = R.degree;
  RationalCurve c{n, R.dim, {}, {}};
  for (int i = 0; i <= n; ++i) {
    const MultiIndex k = edge == Edge::k1_zero ? MultiIndex{0, i} : edge == Edge::k2_zero ? MultiIndex{i, 0}
                                                                                          : MultiIndex{i, n - i};
    const auto p = R.point(k);
    c.coords.insert(c.coords.end(), p.begin(), p.end());
    c.weights.push_back(R.weight(k));
  }
  return c;
}

ControlMap boundary_constraints(const RationalPatch &R, int m, const AlphaWeights &alpha,
                                std::optional<std::pair<double, double>> uv) {
  if (m < 2) throw std::invalid_argument("boundary_constraints: degree must be at least 2");
  struct EdgeSetup {
    Edge edge;
    double au, av;
  };
  // (1 - t) and t sit at the barycentric ends of each edge.
  const EdgeSetup setups[] = {{Edge::k1_zero, alpha.a3, alpha.a2},
                             {Edge::k2_zero, alpha.a3, alpha.a1},
                             {Edge::hypotenuse, alpha.a2, alpha.a1}};
  ControlMap g;
  for (const auto &s : setups) {
    const auto [au, av] = uv.value_or(std::make_pair(s.au, s.av));
    const auto q = boundary_constrained_ls(boundary_curve(R, s.edge), m, true, au, av);
    for (int i = 0; i <= m; ++i) {
      const MultiIndex k = s.edge == Edge::k1_zero ? MultiIndex{0, i} : s.edge == Edge::k2_zero ? MultiIndex{i, 0}
                                                                                                : MultiIndex{i, m - i};
      g[k] = std::vector<double>(q.begin() + i * R.dim, q.begin() + (i + 1) * R.dim);
    }
  }
  return g;
}

}  // namespace rtb

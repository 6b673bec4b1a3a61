#include "rtb/dual_bernstein.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rtb {

HahnParams::HahnParams(double a, double b, int M) : a(a), b(b), M(M) {
  if (!(a > -1.0 && b > -1.0)) throw std::invalid_argument("Hahn parameters a, b must exceed -1");
  if (M < 0) throw std::invalid_argument("Hahn parameter M must be nonnegative");
}

namespace {

// The forward recurrence amplifies rounding by up to ~1e8 for l, M <= 16, so
// the Hahn kernels accumulate in extended precision.
using Wide = long double;

struct HahnCoeffs {
  Wide A;
  Wide B;
};

HahnCoeffs hahn_coeffs(int l, Wide t, const HahnParams &p) {
  const Wide a = p.a, b = p.b, M = p.M;
  const Wide s = a + b + 1;
  auto E = [&](int j) { return (j + a + 1) * (M - j); };
  if (l == 0) {
    // C_0 (s-1)_2 reduces to s + 1; the general form is 0/0 for s in {0, 1}.
    return {(s + 1) * t - E(0), 0};
  }
  const Wide C = (2 * l + s + 1) / ((l + s) * (2 * l + s - 1));
  const Wide D = C * l * (l + M + s) * (l + b);
  return {C * (2 * l + s - 1) * (2 * l + s) * t - D - E(l), -D * E(l - 1)};
}

}  // namespace

double hahn_recurrence_a(int l, double t, const HahnParams &p) { return double(hahn_coeffs(l, t, p).A); }

double hahn_recurrence_b(int l, const HahnParams &p) { return double(hahn_coeffs(l, 0, p).B); }

double hahn_eval(int l, double t, const HahnParams &p) {
  if (l < 0 || l > p.M) throw std::invalid_argument("hahn_eval: degree " + std::to_string(l) + " outside [0, M]");
  Wide prev = 0, cur = 1;
  for (int i = 0; i < l; ++i) {
    const auto [A, B] = hahn_coeffs(i, t, p);
    const Wide next = A * cur + B * prev;
    prev = cur;
    cur = next;
  }
  return double(cur);
}

double clenshaw_hahn(std::span<const double> gamma, double t, const HahnParams &p) {
  if (gamma.empty()) return 0.0;
  const int N = static_cast<int>(gamma.size()) - 1;
  if (N > p.M) throw std::invalid_argument("clenshaw_hahn: series length exceeds M + 1");
  Wide v1 = 0, v2 = 0;  // V_{i+1}, V_{i+2}
  for (int i = N; i >= 0; --i) {
    const Wide b_next = (i + 1 <= N) ? hahn_coeffs(i + 1, t, p).B : 0;
    const Wide v = gamma[i] + hahn_coeffs(i, t, p).A * v1 + b_next * v2;
    v2 = v1;
    v1 = v;
  }
  return double(v1);
}

double e_seed_row(int M, const AlphaWeights &mu, MultiIndex l) {
  if (!in_theta(M, l)) throw std::invalid_argument("e_seed_row: index outside Theta_M");
  const int L = M - l.k1;  // Hahn degree bound
  const double mabs = mu.sum();
  const double s = mabs - mu.a1 + 1.0;  // a + b + 1 for (a, b) = (mu2, mu3)

  // C*_0 directly, C*_1 directly, then the i -> i+1 ratio.
  std::vector<double> cstar(L + 1);
  cstar[0] = pochhammer(mu.a1 + 2.0, M) / pochhammer(s + 1.0, L);
  if (L >= 1) {
    cstar[1] = -(2.0 + s) * pochhammer(mu.a1 + 2.0, M - 1) * (mabs + M + 3.0) /
               ((mu.a3 + 1.0) * pochhammer(s + 1.0, L + 1));
  }
  for (int i = 1; i < L; ++i) {
    const double ratio = -(2.0 * i + 2.0 + s) / (2.0 * i + s) / (mu.a1 + M - i + 1.0) * (mabs + M + 3.0 + i) /
                         ((i + 1.0) * (mu.a3 + 1.0 + i)) * (s + i) / (s + i + L + 1.0);
    cstar[i + 1] = cstar[i] * ratio;
  }

  const HahnParams hp(mu.a2, mu.a3, L);
  const double sum = clenshaw_hahn(cstar, static_cast<double>(l.k2), hp);
  double factor = pochhammer(mabs + 3.0, M) / pochhammer(mu.a1 + 2.0, l.k1);
  for (int i = 2; i <= M; ++i) factor /= i;
  return ((l.k1 % 2) ? -factor : factor) * sum;
}

DualGramTable e_table(int M, const AlphaWeights &mu) {
  if (M < 0) throw std::invalid_argument("e_table: negative degree");
  DualGramTable tab{M, mu, {}};
  const std::size_t n = tab.size();
  tab.entries.assign(n * n, 0.0);
  std::vector<char> filled(n * n, 0);

  auto pos = [M](MultiIndex k) { return theta_position(M, k); };
  auto get = [&](MultiIndex k, MultiIndex l) -> double {
    if (!in_theta(M, k) || !in_theta(M, l)) return 0.0;  // multiplied by a vanishing coefficient
    assert(filled[pos(k) * n + pos(l)]);
    return tab.entries[pos(k) * n + pos(l)];
  };
  auto put = [&](MultiIndex k, MultiIndex l, double v) {
    tab.entries[pos(k) * n + pos(l)] = v;
    tab.entries[pos(l) * n + pos(k)] = v;
    filled[pos(k) * n + pos(l)] = filled[pos(l) * n + pos(k)] = 1;
  };

  // Seed row, including l1 = M where the Hahn sum collapses to its first term.
  for (int l1 = 0; l1 <= M; ++l1)
    for (int l2 = 0; l1 + l2 <= M; ++l2) put({0, 0}, {l1, l2}, e_seed_row(M, mu, {l1, l2}));

  const double fM = M;
  auto sigma0 = [&](MultiIndex t) { return (t.order() - fM) * (t.k2 + mu.a2 + 1.0); };
  auto sigma2 = [&](MultiIndex t) { return t.k2 * (t.order() - mu.a3 - fM - 1.0); };
  auto sigma1 = [&](MultiIndex t) { return sigma0(t) + sigma2(t); };
  auto tau0 = [&](MultiIndex t) { return (t.order() - fM) * (t.k1 + mu.a1 + 1.0); };
  auto tau2 = [&](MultiIndex t) { return t.k1 * (t.order() - mu.a3 - fM - 1.0); };
  auto tau1 = [&](MultiIndex t) { return tau0(t) + tau2(t); };

  constexpr MultiIndex v1{1, 0}, v2{0, 1};
  for (int k1 = 0; k1 < M; ++k1) {
    // Step along k2 for rows with first index k1.
    for (int k2 = 0; k2 <= M - k1 - 1; ++k2) {
      const MultiIndex k{k1, k2};
      const double den = sigma0(k);
      assert(den != 0.0);
      for (int l1 = k1; l1 <= M; ++l1) {
        for (int l2 = 0; l1 + l2 <= M; ++l2) {
          const MultiIndex l{l1, l2};
          const double v = ((sigma1(k) - sigma1(l)) * get(k, l) - (k2 > 0 ? sigma2(k) * get(k - v2, l) : 0.0) +
                            sigma0(l) * get(k, l + v2) + sigma2(l) * get(k, l - v2)) /
                           den;
          put(k + v2, l, v);
        }
      }
    }
    // Step along k1 from (k1, 0).
    const MultiIndex k{k1, 0};
    const double den = tau0(k);
    assert(den != 0.0);
    for (int l1 = k1 + 1; l1 <= M; ++l1) {
      for (int l2 = 0; l1 + l2 <= M; ++l2) {
        const MultiIndex l{l1, l2};
        const double v = ((tau1(k) - tau1(l)) * get(k, l) - (k1 > 0 ? tau2(k) * get(k - v1, l) : 0.0) +
                          tau0(l) * get(k, l + v1) + tau2(l) * get(k, l - v1)) /
                         den;
        put(k + v1, l, v);
      }
    }
  }

  for (char f : filled)
    if (!f) throw std::logic_error("e_table: recurrence left an entry unset");
  return tab;
}

ETable E_table(int m, const AlphaWeights &alpha, const ConstraintVector &c) {
  const auto sets = index_sets(m, c);
  const int M = m - c.order();
  const AlphaWeights mu(alpha.a1 + 2 * c.c1, alpha.a2 + 2 * c.c2, alpha.a3 + 2 * c.c3);
  const auto e = e_table(M, mu);
  const MultiIndex cp{c.c1, c.c2};

  ETable out{m, c, alpha, sets.omega, {}};
  const std::size_t n = out.size();
  out.entries.assign(n * n, 0.0);

  // U and V_k overflow double for large m; accumulate logarithms there.
  const bool use_logs = m > 25;
  std::vector<double> V(n);
  double U;
  if (use_logs) {
    auto log_poch = [](double a, int k) { return std::lgamma(a + k) - std::lgamma(a); };
    auto log_multinomial = [](int n, MultiIndex k) {
      return std::lgamma(n + 1.0) - std::lgamma(k.k1 + 1.0) - std::lgamma(k.k2 + 1.0) -
             std::lgamma(k.third(n) + 1.0);
    };
    const double logU = log_poch(alpha.sum() + 3.0, 2 * c.order()) - log_poch(alpha.a1 + 1.0, 2 * c.c1) -
                        log_poch(alpha.a2 + 1.0, 2 * c.c2) - log_poch(alpha.a3 + 1.0, 2 * c.c3);
    std::vector<double> logV(n);
    for (std::size_t i = 0; i < n; ++i)
      logV[i] = log_multinomial(M, out.omega[i] - cp) - log_multinomial(m, out.omega[i]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = std::exp(logU + logV[i] + logV[j]) * e.at(out.omega[i] - cp, out.omega[j] - cp);
        out.entries[i * n + j] = out.entries[j * n + i] = v;
      }
    return out;
  }

  U = pochhammer(alpha.sum() + 3.0, 2 * c.order()) /
      (pochhammer(alpha.a1 + 1.0, 2 * c.c1) * pochhammer(alpha.a2 + 1.0, 2 * c.c2) *
       pochhammer(alpha.a3 + 1.0, 2 * c.c3));
  for (std::size_t i = 0; i < n; ++i) V[i] = multinomial(M, out.omega[i] - cp) / multinomial(m, out.omega[i]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = U * V[i] * V[j] * e.at(out.omega[i] - cp, out.omega[j] - cp);
      out.entries[i * n + j] = out.entries[j * n + i] = v;
    }
  return out;
}

}  // namespace rtb

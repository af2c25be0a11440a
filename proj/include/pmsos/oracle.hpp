// Ground truth and diagnostics: exhaustive binary minimization, sampled
// ball minima, Krawtchouk least roots, convergence-theorem hypothesis
// checks, rate-bound evaluation, Lipschitz estimates, and the
// characteristic-polynomial membership cross-check.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pmsos/json_io.hpp"
#include "pmsos/matrix_poly.hpp"
#include "pmsos/polynomial.hpp"

namespace pmsos {

inline constexpr double kOracleFeasTol = 1e-10;

struct OracleResult {
  double f_min = 0.0;
  std::vector<double> argmin;
  // max over infeasible domain points of lambda_min(G(x)); binary only,
  // absent when the whole cube is feasible.
  std::optional<double> lambda_gap;
  long long feasible_count = 0;
  bool upper_bound_only = false;  // sampling gives upper bounds, not minima
};

namespace detail {

// Deterministic cross-platform RNG: mt19937_64 is pinned by the standard,
// and the uniform/normal transforms below avoid the library-defined
// distribution adapters.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform() {
    return static_cast<double>(g_() >> 11) * 0x1.0p-53;  // [0, 1)
  }
  double normal() {
    if (has_) {
      has_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586 * u2;
    cached_ = rad * std::sin(ang);
    has_ = true;
    return rad * std::cos(ang);
  }
  // Uniform over the unit ball: Gaussian direction, radius u^(1/n).
  std::vector<double> ball_point(int n) {
    std::vector<double> x(n);
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] = normal();
      norm2 += x[i] * x[i];
    }
    const double norm = std::sqrt(std::max(norm2, 1e-300));
    const double rad = std::pow(uniform(), 1.0 / n);
    for (int i = 0; i < n; ++i) x[i] *= rad / norm;
    return x;
  }

 private:
  std::mt19937_64 g_;
  bool has_ = false;
  double cached_ = 0.0;
};

inline bool lex_less(const std::vector<double>& a,
                     const std::vector<double>& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

}  // namespace detail

// Exact minimization over the binary cube by enumeration; also reports the
// discrete spectral gap lambda = max over infeasible points of
// lambda_min(G(x)).
inline OracleResult brute_force_binary(const MultiPoly& f,
                                       const SymPolyMatrix& g) {
  const int n = f.nvars();
  if (g.nvars() != n)
    throw std::invalid_argument("brute_force_binary: variable mismatch");
  if (n > 22)
    throw std::invalid_argument(
        "brute_force_binary: n > 22 enumeration guard");

  struct Local {
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> arg;
    double lam = -std::numeric_limits<double>::infinity();
    bool any_infeasible = false;
    long long feasible = 0;
  };
  const std::uint64_t total = std::uint64_t{1} << n;
  auto scan = [&](std::uint64_t lo, std::uint64_t hi, Local& out) {
    std::vector<double> x(n);
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
      for (int i = 0; i < n; ++i) x[i] = (mask >> i) & 1u ? 1.0 : 0.0;
      const double eig = g.min_eigenvalue(x);
      if (eig >= -kOracleFeasTol) {
        ++out.feasible;
        const double fx = f.eval(x);
        if (fx < out.best ||
            (fx == out.best && detail::lex_less(x, out.arg))) {
          out.best = fx;
          out.arg = x;
        }
      } else {
        out.any_infeasible = true;
        out.lam = std::max(out.lam, eig);
      }
    }
  };

  std::vector<Local> parts;
  if (total <= (std::uint64_t{1} << 16)) {
    parts.resize(1);
    scan(0, total, parts[0]);
  } else {
    const unsigned nt =
        std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    parts.resize(nt);
    std::vector<std::thread> threads;
    const std::uint64_t chunk = (total + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t)
      threads.emplace_back(scan, t * chunk,
                           std::min(total, (t + 1) * chunk),
                           std::ref(parts[t]));
    for (auto& th : threads) th.join();
  }

  Local merged;
  for (const auto& p : parts) {
    merged.feasible += p.feasible;
    if (p.any_infeasible) {
      merged.any_infeasible = true;
      merged.lam = std::max(merged.lam, p.lam);
    }
    if (p.arg.empty()) continue;
    if (p.best < merged.best ||
        (p.best == merged.best &&
         (merged.arg.empty() || detail::lex_less(p.arg, merged.arg)))) {
      merged.best = p.best;
      merged.arg = p.arg;
    }
  }
  if (merged.arg.empty())
    throw std::runtime_error("brute_force_binary: empty feasible set");

  OracleResult res;
  res.f_min = merged.best;
  res.argmin = merged.arg;
  res.feasible_count = merged.feasible;
  if (merged.any_infeasible) res.lambda_gap = merged.lam;
  return res;
}

// Sampled upper bound for the ball-constrained problem: uniform rejection
// sampling followed by a fixed 100-round derivative-free coordinate polish.
inline OracleResult sample_min_ball(const MultiPoly& f,
                                    const SymPolyMatrix& g, long samples,
                                    std::uint64_t seed) {
  const int n = f.nvars();
  if (g.nvars() != n)
    throw std::invalid_argument("sample_min_ball: variable mismatch");
  if (samples < 1)
    throw std::invalid_argument("sample_min_ball: need samples >= 1");

  detail::Rng rng(seed);
  auto feasible = [&](const std::vector<double>& x) {
    double norm2 = 0.0;
    for (double xi : x) norm2 += xi * xi;
    if (norm2 > 1.0 + kOracleFeasTol) return false;
    return g.min_eigenvalue(x) >= -kOracleFeasTol;
  };

  OracleResult res;
  res.upper_bound_only = true;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> arg;
  for (long s = 0; s < samples; ++s) {
    std::vector<double> x = rng.ball_point(n);
    if (!feasible(x)) continue;
    ++res.feasible_count;
    const double fx = f.eval(x);
    if (fx < best) {
      best = fx;
      arg = x;
    }
  }
  if (arg.empty())
    throw std::runtime_error("sample_min_ball: no feasible sample found");

  double step = 0.2;
  for (int it = 0; it < 100; ++it) {
    for (int i = 0; i < n; ++i) {
      for (double dir : {+1.0, -1.0}) {
        std::vector<double> x = arg;
        x[i] += dir * step;
        if (!feasible(x)) continue;
        const double fx = f.eval(x);
        if (fx < best) {
          best = fx;
          arg = x;
        }
      }
    }
    step *= 0.9;
  }
  res.f_min = best;
  res.argmin = arg;
  return res;
}

// Least root of the degree-r binary (p = 1/2) Krawtchouk polynomial with
// parameter n, via the smallest eigenvalue of the Jacobi matrix of the
// three-term recurrence (convention K_1(x) = n - 2x, so xi_1 = n/2).
inline double krawtchouk_least_root(int r, int n) {
  if (r < 1 || r > n)
    throw std::invalid_argument("krawtchouk_least_root: need 1 <= r <= n");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(r, r);
  for (int i = 0; i < r; ++i) j(i, i) = n / 2.0;
  for (int i = 0; i + 1 < r; ++i) {
    const double b = std::sqrt(static_cast<double>(i + 1) * (n - i)) / 2.0;
    j(i, i + 1) = j(i + 1, i) = b;
  }
  if (r == 1) return n / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  return es.eigenvalues().minCoeff();
}

struct HypothesisCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool satisfied = false;
  double slack = 0.0;  // threshold - value for upper bounds, value -
                       // threshold for lower bounds; >= 0 when satisfied
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  bool all_satisfied = true;
  void add(std::string name, double value, double threshold, bool upper) {
    HypothesisCheck c;
    c.name = std::move(name);
    c.value = value;
    c.threshold = threshold;
    c.satisfied = upper ? value <= threshold : value >= threshold;
    c.slack = upper ? threshold - value : value - threshold;
    all_satisfied = all_satisfied && c.satisfied;
    checks.push_back(std::move(c));
  }
};

struct HypoParams {
  int n = 1, d = 1, l = 1, r = 1, v = 1, m = 1;
};

// Advisory checks of the convergence theorems' hypotheses; never blocks.
inline HypothesisReport check_hypotheses(Domain kind, const HypoParams& p) {
  HypothesisReport rep;
  if (kind == Domain::Binary) {
    rep.add("(r+1)/n <= 1/2", (p.r + 1.0) / p.n, 0.5, true);
    rep.add("r+1 <= n (xi_{r+1} defined)", p.r + 1.0, p.n, true);
    const bool xi_ok = p.r + 1 <= p.n && p.r + 1 >= 1;
    const double xi = xi_ok ? krawtchouk_least_root(p.r + 1, p.n) : 0.0;
    const double df = 2.0 * p.l * (p.v + 1);
    if (xi_ok) {
      rep.add("d(d+1) xi_{r+1}^n <= 1/2",
              static_cast<double>(p.d) * (p.d + 1) * xi, 0.5, true);
      rep.add("2l(v+1)(2l(v+1)+1) xi_{r+1}^n <= 1/2", df * (df + 1.0) * xi,
              0.5, true);
    } else {
      rep.add("d(d+1) xi_{r+1}^n <= 1/2 (xi undefined)", 1.0, 0.5, true);
      rep.add("2l(v+1)(2l(v+1)+1) xi_{r+1}^n <= 1/2 (xi undefined)", 1.0,
              0.5, true);
    }
    rep.add("l(v+1) <= r", static_cast<double>(p.l) * (p.v + 1),
            static_cast<double>(p.r), true);
  } else {
    const double bound =
        2.0 * p.n * std::max<double>(p.d, 2.0 * p.l * (p.v + 1));
    rep.add("r >= 2n max{d, 2l(v+1)}", static_cast<double>(p.r), bound,
            false);
  }
  return rep;
}

struct RateParams {
  int n = 1, m = 1, d = 1, l = 1, v = 1, r = 1;
  double f_norm = 1.0;
  double lambda = -1.0;  // discrete spectral gap (binary), in [-1, 0)
  double delta = 0.5;    // neighborhood width (ball), in (0, 1]
  double L_f = 1.0;      // Lipschitz number of f on the ball
  double C_loj = 1.0;    // Lojasiewicz constant (user data)
  double L_loj = 1.0;    // Lojasiewicz exponent in (0, 1] (user data)
  double E_f = 0.0;      // f_min when positive (degree-threshold input)
  bool loj_user_supplied = false;
};

struct RateDiagnostics {
  double a_const = 0.0;     // e^{-1/(2e+1)}
  double xi = 0.0;          // xi_{r+1}^n (binary; 0 when undefined)
  double V_bound = 0.0;     // ||f|| 16 m e^2 |lambda|^{-1} a^{-lambda v}
  double U_bound = 0.0;     // ||f|| 16 e^2 m delta^{-1} a^{delta v}
  double xi_term = 0.0;     // 2(||f||(-2m/lambda + 1) + V) xi/n, C_d-free
  double C_B = 0.0;         // 2(n+1)^2 D^2 gamma(B^n)_D, D = max{d,2l(v+1)}
  double thm42_rhs = 0.0;   // 2(||f||(1+m/delta)+U) C_B/r^2 + U + C L_f d^L
  double b = 0.0;           // -2 ln(r)/ln(a)
  double gamma = 0.0;       // (n+1)^2 e^{(n-2)/2} d'^{(n+3)/2} / (C L_f)
  double d_prime = 0.0;     // max{ceil(d/2), l}
  double v_choice = 0.0;    // balanced v from the rate analysis
  double delta_choice = 0.0;
  double rate_exponent = 0.0;  // -2L/(n+2L+5)
  double thm51_degree = 0.0;   // degree threshold (rho = 1)
  double L_f = 0.0, C_loj = 0.0, L_loj = 0.0, E_f = 0.0;
  std::string Cd_note;
  std::vector<std::string> flags;
};

inline double cb_constant(int n, int dd) {
  if (n < 2) return 0.0;  // the cited constant needs n >= 2
  double best = 0.0;
  double binom = 1.0;  // C(k + n - 2, n - 2), incremental in k
  for (int k = 0; k <= dd; ++k) {
    if (k > 0) binom *= static_cast<double>(k + n - 2) / k;
    best = std::max(best, (1.0 + 2.0 * k / (n - 1)) * binom);
  }
  return 2.0 * (n + 1.0) * (n + 1.0) * dd * dd * std::sqrt(best);
}

// Evaluates every rate-theorem quantity as a diagnostic; nothing here is
// asserted as tight, and user-supplied constants are flagged.
inline RateDiagnostics rate_bounds(Domain kind, const RateParams& p) {
  RateDiagnostics d;
  const double a = std::exp(-1.0 / (2.0 * std::exp(1.0) + 1.0));
  const double e2 = std::exp(2.0);
  d.a_const = a;
  d.L_f = p.L_f;
  d.C_loj = p.C_loj;
  d.L_loj = p.L_loj;
  d.E_f = p.E_f;
  d.Cd_note =
      "C_d is an unspecified degree-dependent constant; xi_term excludes it";
  if (!p.loj_user_supplied)
    d.flags.push_back("Lojasiewicz data defaulted to C = 1, L = 1");
  d.flags.push_back("degree threshold evaluated with rho = 1 (unspecified)");

  const double abs_lambda = std::abs(p.lambda);
  if (abs_lambda > 0.0) {
    d.V_bound = p.f_norm * 16.0 * p.m * e2 / abs_lambda *
                std::pow(a, abs_lambda * p.v);
  }
  if (p.delta > 0.0) {
    d.U_bound =
        p.f_norm * 16.0 * e2 * p.m / p.delta * std::pow(a, p.delta * p.v);
  }

  if (kind == Domain::Binary) {
    if (p.r + 1 <= p.n) {
      d.xi = krawtchouk_least_root(p.r + 1, p.n);
      if (abs_lambda > 0.0)
        d.xi_term = 2.0 *
                    (p.f_norm * (2.0 * p.m / abs_lambda + 1.0) + d.V_bound) *
                    d.xi / p.n;
    } else {
      d.flags.push_back("xi_{r+1}^n undefined (r + 1 > n)");
    }
  }

  const int dd = std::max(p.d, 2 * p.l * (p.v + 1));
  d.C_B = cb_constant(p.n, dd);
  if (p.n < 2) d.flags.push_back("C_B undefined for n < 2; reported 0");
  if (p.delta > 0.0)
    d.thm42_rhs = 2.0 * (p.f_norm * (1.0 + p.m / p.delta) + d.U_bound) *
                      d.C_B / (static_cast<double>(p.r) * p.r) +
                  d.U_bound +
                  p.C_loj * p.L_f * std::pow(p.delta, p.L_loj);

  d.d_prime = std::max((p.d + 1) / 2, p.l);
  d.b = p.r > 1 ? -2.0 * std::log(static_cast<double>(p.r)) / std::log(a)
                : 0.0;
  const double s = p.n + 2.0 * p.L_loj + 5.0;
  d.rate_exponent = -2.0 * p.L_loj / s;
  const double clf = std::max(p.C_loj * p.L_f, 1e-300);
  d.gamma = (p.n + 1.0) * (p.n + 1.0) * std::exp((p.n - 2.0) / 2.0) *
            std::pow(d.d_prime, (p.n + 3.0) / 2.0) / clf;
  if (d.b > 0.0) {
    d.v_choice = std::floor(std::pow(d.gamma, -2.0 / s) *
                            std::pow(d.b, 2.0 * (p.L_loj + 1.0) / s) *
                            std::pow(static_cast<double>(p.r), 4.0 / s));
    d.delta_choice = std::pow(d.gamma, 2.0 / s) *
                     std::pow(d.b, (p.n + 3.0) / s) *
                     std::pow(static_cast<double>(p.r), -4.0 / s);
  }
  if (p.E_f > 0.0) {
    const double expo = 1.0 + (p.n + 5.0) / (2.0 * p.L_loj);
    d.thm51_degree = std::pow(p.m * p.n * std::max(p.C_loj * p.L_f, 1.0),
                              expo) *
                     std::pow(std::exp(1.0) * d.d_prime, s / 2.0) *
                     std::pow(p.E_f, -expo);
  } else {
    d.flags.push_back("degree threshold needs E_f = f_min > 0; reported 0");
  }
  return d;
}

struct LipschitzEstimate {
  double sampled = 0.0;  // max ||grad f||_2 over sampled ball points
  double upper = 0.0;    // sum_a |f_a| |a|, valid on the unit ball
};

inline LipschitzEstimate lipschitz_estimate(const MultiPoly& f, int samples,
                                            std::uint64_t seed) {
  if (samples < 2)
    throw std::invalid_argument("lipschitz_estimate: need samples >= 2");
  const int n = f.nvars();
  LipschitzEstimate est;
  for (const auto& [mo, c] : f.terms())
    est.upper += std::abs(c) * mo.degree();
  std::vector<MultiPoly> grad;
  grad.reserve(n);
  for (int i = 0; i < n; ++i) grad.push_back(f.partial(i));
  detail::Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const std::vector<double> x = rng.ball_point(n);
    double g2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double gi = grad[i].eval(x);
      g2 += gi * gi;
    }
    est.sampled = std::max(est.sampled, std::sqrt(g2));
  }
  return est;
}

struct MembershipRecord {
  bool member = false;      // all charpoly coefficients c_i(x) >= -tol
  bool eig_member = false;  // lambda_min(G(x)) >= -tol
  bool agree = false;
  double min_eig = 0.0;
  std::vector<double> coeff_values;
};

// Scalarized membership test: G(x) >= 0 iff every coefficient
// c_i(x) = e_i(eigenvalues) of the characteristic polynomial is
// nonnegative.  Precomputing the symbolic coefficients amortizes repeated
// point queries.
class DescartesChecker {
 public:
  explicit DescartesChecker(const SymPolyMatrix& g)
      : g_(g), coeffs_(charpoly_coeffs(g)) {}

  MembershipRecord check(const std::vector<double>& x,
                         double tol = 1e-9) const {
    MembershipRecord rec;
    rec.member = true;
    for (const auto& c : coeffs_) {
      const double v = c.eval(x);
      rec.coeff_values.push_back(v);
      if (v < -tol) rec.member = false;
    }
    rec.min_eig = g_.min_eigenvalue(x);
    rec.eig_member = rec.min_eig >= -tol;
    rec.agree = rec.member == rec.eig_member;
    return rec;
  }

  const std::vector<MultiPoly>& coeffs() const { return coeffs_; }

 private:
  SymPolyMatrix g_;
  std::vector<MultiPoly> coeffs_;
};

inline MembershipRecord descartes_membership(const SymPolyMatrix& g,
                                             const std::vector<double>& x,
                                             double tol = 1e-9) {
  return DescartesChecker(g).check(x, tol);
}

}  // namespace pmsos

#pragma once

// The univariate penalty pipeline: Taylor coefficients of
// phi(u) = (1 - 4u)^{-1/2}/2 - 1/2, the concatenation polynomials
// c_k(t) = t + (2t-1) T_k(t(1-t)), the smooth step q_k(lambda, N), its
// one-sided Chebyshev approximation p = cheb_fit + shift, the Jackson /
// envelope bound formulas, and the Fekete-Markov-Lukacs split
// h = h1 + (1-t^2) h2 computed by a small SOS feasibility SDP.

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmsos/solver.hpp"
#include "pmsos/unipoly.hpp"

namespace pmsos {

// a = e^{-1/(2e+1)} ~ 0.8561, the geometric rate of the penalty envelope.
inline double envelope_rate() {
  static const double a = std::exp(-1.0 / (2.0 * std::exp(1.0) + 1.0));
  return a;
}

struct PenaltySpec {
  double lambda = -1.0;  // breakpoint in [-1, 0)
  double N = 1.0;        // plateau height > 0
  int k = 0;             // smoothness order >= 0
  int v = 1;             // approximation degree > k

  void validate() const {
    if (!(lambda >= -1.0 && lambda < 0.0))
      throw std::invalid_argument("PenaltySpec: lambda must be in [-1, 0)");
    if (!(N > 0.0)) throw std::invalid_argument("PenaltySpec: N must be > 0");
    if (k < 0) throw std::invalid_argument("PenaltySpec: k must be >= 0");
    if (v <= k) throw std::invalid_argument("PenaltySpec: need v > k");
  }
};

// Taylor coefficients a_0..a_k of phi; a_0 = 0, a_1 = 1, and
// a_{i+1} = a_i * 4(i + 1/2)/(i + 1)  (closed form (4^i/i!) prod(j+1/2) / 2).
inline std::vector<double> phi_taylor_coeffs(int k) {
  if (k < 0) throw std::invalid_argument("phi_taylor_coeffs: k >= 0");
  std::vector<double> a(k + 1, 0.0);
  if (k >= 1) a[1] = 1.0;
  for (int i = 1; i < k; ++i) a[i + 1] = a[i] * 4.0 * (i + 0.5) / (i + 1.0);
  return a;
}

// c_k(t) = t + (2t - 1) * T_k(t(1-t)) with T_k the degree-k Taylor polynomial
// of phi.  Degree 2k+1; c_k(0) = 0, c_k(1) = 1, k flat derivatives at both.
inline UniPoly concat_poly(int k) {
  const auto a = phi_taylor_coeffs(k);
  const UniPoly u = UniPoly({0.0, 1.0, -1.0});  // t(1 - t)
  UniPoly taylor;                               // T_k(u), by Horner in u
  for (int i = k; i >= 0; --i) taylor = taylor * u + UniPoly::constant(a[i]);
  return UniPoly::t() + UniPoly({-1.0, 2.0}) * taylor;
}

// The smooth step q_k(lambda, N): 0 on [0,1], N on [-1,lambda],
// N*c_k(t/lambda) in between.
class PenaltyStep {
 public:
  explicit PenaltyStep(const PenaltySpec& spec)
      : spec_(spec), ck_(concat_poly(spec.k)) {
    spec.validate();
  }

  double operator()(double t) const { return eval(t); }
  double eval(double t) const {
    if (t < -1.0 - 1e-12 || t > 1.0 + 1e-12)
      throw std::invalid_argument("q_eval: t outside [-1, 1]");
    if (t >= 0.0) return 0.0;
    if (t <= spec_.lambda) return spec_.N;
    return spec_.N * ck_.eval(t / spec_.lambda);
  }

  // k-th derivative of q, for the grid total-variation oracle.
  double derivative_k(double t) const {
    if (spec_.k == 0) return eval(t);
    if (t >= 0.0 || t <= spec_.lambda) return 0.0;
    UniPoly d = ck_;
    for (int i = 0; i < spec_.k; ++i) d = d.derivative();
    return spec_.N * std::pow(1.0 / spec_.lambda, spec_.k) *
           d.eval(t / spec_.lambda);
  }

  const PenaltySpec& spec() const { return spec_; }
  const UniPoly& concat() const { return ck_; }

 private:
  PenaltySpec spec_;
  UniPoly ck_;
};

inline double q_eval(const PenaltySpec& spec, double t) {
  return PenaltyStep(spec).eval(t);
}

// k = max{0, floor((delta v - 2e)/(2e + delta))}; guarantees
// 4^k k! / (delta^k (v-k)^k) <= e^2 a^{delta v}.
inline int choose_k(double delta, int v) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("choose_k: delta in (0, 1]");
  if (v < 1) throw std::invalid_argument("choose_k: v >= 1");
  const double e = std::exp(1.0);
  const double raw = (delta * v - 2.0 * e) / (2.0 * e + delta);
  return std::max(0, static_cast<int>(std::floor(raw)));
}

// V = 3 N |lambda|^{-k} 4^k k! k, a bound on the total variation of q^{(k)};
// +infinity sentinel for k = 0 (the Jackson path needs k >= 1).
inline double total_variation_bound(const PenaltySpec& spec) {
  if (spec.k == 0) return std::numeric_limits<double>::infinity();
  double v = 3.0 * spec.N * spec.k;
  for (int i = 1; i <= spec.k; ++i)
    v *= 4.0 * i / std::abs(spec.lambda);  // accumulates 4^k k! |lambda|^{-k}
  return v;
}

// Jackson-type interpolation error bound 4V / (pi k (v-k)^k).
inline double jackson_interp_bound(const PenaltySpec& spec) {
  if (spec.k < 1) return std::numeric_limits<double>::infinity();
  const double pi = std::acos(-1.0);
  return 4.0 * total_variation_bound(spec) /
         (pi * spec.k * std::pow(spec.v - spec.k, spec.k));
}

// The theoretical one-sided shift 4 N |lambda|^{-k} 4^k k! / (v-k)^k
// (literal value 4N at k = 0).
inline double theoretical_shift(const PenaltySpec& spec) {
  double s = 4.0 * spec.N;
  for (int i = 1; i <= spec.k; ++i)
    s *= 4.0 * i / (std::abs(spec.lambda) * (spec.v - spec.k));
  return s;
}

// Envelope bound 8 N e^2 a^{|lambda| v} on sup(p - q).
inline double jackson_error_bound(const PenaltySpec& spec) {
  return 8.0 * spec.N * std::exp(2.0) *
         std::pow(envelope_rate(), std::abs(spec.lambda) * spec.v);
}

// Verification grid: 10^4 equispaced points of [-1,1] plus the breakpoints
// {lambda, 0} and all interpolation nodes.
inline std::vector<double> penalty_grid(const PenaltySpec& spec,
                                        int base = 10000) {
  std::set<double> pts;
  for (int i = 0; i <= base; ++i) pts.insert(-1.0 + 2.0 * i / base);
  pts.insert(spec.lambda);
  pts.insert(0.0);
  for (double x : ChebPoly::nodes(spec.v)) pts.insert(std::clamp(x, -1.0, 1.0));
  return {pts.begin(), pts.end()};
}

struct ChebFit {
  ChebPoly cheb;
  double grid_sup_error = 0.0;
};

// Degree-v Chebyshev interpolant of q at second-kind points, with the
// measured sup-error on the verification grid.
inline ChebFit cheb_fit(const PenaltySpec& spec) {
  spec.validate();
  const PenaltyStep q(spec);
  ChebFit out;
  out.cheb = ChebPoly::interpolate([&](double t) { return q.eval(t); }, spec.v);
  for (double t : penalty_grid(spec))
    out.grid_sup_error =
        std::max(out.grid_sup_error, std::abs(out.cheb.eval(t) - q.eval(t)));
  return out;
}

enum class ShiftMode { Auto, Theoretical, Empirical };

inline std::string shift_mode_name(ShiftMode m) {
  switch (m) {
    case ShiftMode::Theoretical: return "theoretical";
    case ShiftMode::Empirical: return "empirical";
    default: return "auto";
  }
}

struct PenaltyResult {
  PenaltySpec spec;
  ChebPoly cheb;          // interpolant of q (without the shift)
  UniPoly p;              // monomial form of cheb + shift; empty above v ~ 60
  double shift = 0.0;
  std::string shift_mode; // which mode actually produced the shift
  double grid_sup_error = 0.0;   // sup |cheb - q|
  double sup_p_minus_q = 0.0;    // grid sup of p - q (>= 0 by construction)
  double min_p_minus_q = 0.0;    // grid min of p - q
  double bound = 0.0;            // Prop-style envelope 8 N e^2 a^{|lambda| v}
  double tv_bound = 0.0;
  double jackson_bound = 0.0;

  double p_eval(double t) const { return cheb.eval(t) + shift; }
};

constexpr int kChebToMonomialMaxDegree = 60;

// Full pipeline: interpolate q, add the one-sided shift, verify p >= q >= 0
// on the grid.  Theoretical shift is the default for k >= 1; k = 0 always
// uses empirical (Jackson machinery undefined there).
inline PenaltyResult penalty_poly(const PenaltySpec& spec,
                                  ShiftMode mode = ShiftMode::Auto) {
  spec.validate();
  const PenaltyStep q(spec);
  PenaltyResult out;
  out.spec = spec;
  ChebFit fit = cheb_fit(spec);
  out.cheb = fit.cheb;
  out.grid_sup_error = fit.grid_sup_error;
  out.tv_bound = total_variation_bound(spec);
  out.jackson_bound = jackson_interp_bound(spec);
  out.bound = jackson_error_bound(spec);

  ShiftMode effective = mode;
  if (mode == ShiftMode::Auto)
    effective = spec.k >= 1 ? ShiftMode::Theoretical : ShiftMode::Empirical;
  if (spec.k == 0) effective = ShiftMode::Empirical;
  out.shift = effective == ShiftMode::Theoretical
                  ? theoretical_shift(spec)
                  : 1.05 * fit.grid_sup_error;
  out.shift_mode = shift_mode_name(effective);

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double t : penalty_grid(spec)) {
    const double diff = out.cheb.eval(t) + out.shift - q.eval(t);
    lo = std::min(lo, diff);
    hi = std::max(hi, diff);
  }
  out.min_p_minus_q = lo;
  out.sup_p_minus_q = hi;
  if (lo < -1e-10)
    throw std::runtime_error(
        "penalty_poly: one-sided guarantee failed on the grid (p - q min " +
        std::to_string(lo) + "); increase v relative to k");

  if (spec.v <= kChebToMonomialMaxDegree) {
    out.p = out.cheb.to_unipoly() + UniPoly::constant(out.shift);
  }
  return out;
}

struct FmlResult {
  UniPoly h1, h2;
  Eigen::MatrixXd gram1, gram2;  // PSD Gram certificates (eigenvalue-floored)
  double residual = 0.0;         // coefficient error of h1 + (1-t^2) h2 - h
};

namespace detail {
inline Eigen::MatrixXd floor_psd(const Eigen::MatrixXd& m, double floor = 0.0) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

inline UniPoly gram_to_poly(const Eigen::MatrixXd& g) {
  if (g.size() == 0) return UniPoly();
  std::vector<double> c(2 * g.rows() - 1, 0.0);
  for (int p = 0; p < g.rows(); ++p)
    for (int q = 0; q < g.cols(); ++q) c[p + q] += g(p, q);
  return UniPoly(std::move(c));
}
}  // namespace detail

// Fekete-Markov-Lukacs split of h >= 0 on [-1,1] into h1 + (1-t^2) h2 with
// h1, h2 SOS of degrees <= 2 ceil(k/2) and 2 ceil(k/2) - 2 (k = deg h by
// default).  Computed as a minimum-trace SOS feasibility SDP.
inline FmlResult fml_decompose(const UniPoly& h, int k = -1,
                               const SolveOptions& opt = {}) {
  if (k < 0) k = std::max(h.degree(), 0);
  if (h.degree() > k)
    throw std::invalid_argument("fml_decompose: deg h exceeds requested k");
  const int grid = 10000;
  for (int i = 0; i <= grid; ++i) {
    const double t = -1.0 + 2.0 * i / grid;
    if (h.eval(t) < -1e-9)
      throw std::invalid_argument(
          "fml_decompose: h is negative on [-1,1] (h(" + std::to_string(t) +
          ") = " + std::to_string(h.eval(t)) + ")");
  }
  const int kk = (k + 1) / 2;  // ceil(k/2)
  const int s1 = kk + 1;       // Gram size for h1 (degree <= 2 kk)
  const int s2 = kk;           // Gram size for h2 (degree <= 2 kk - 2)
  const int ncon = 2 * kk + 1; // coefficient-matching equations, degrees 0..2kk

  SdpProblem p;
  p.sense = Sense::Max;
  for (int d = 0; d < ncon; ++d) p.var_names.push_back("c" + std::to_string(d));
  p.c = Eigen::VectorXd::Zero(ncon);
  for (int d = 0; d < ncon; ++d) p.c(d) = h.coef(d);
  auto& b1 = p.add_block("H1", s1);
  for (int r = 0; r < s1; ++r)
    for (int c = r; c < s1; ++c) b1.A[r + c].add(r, c, 1.0);
  for (int r = 0; r < s1; ++r) b1.C.add(r, r, -1.0);  // min-trace objective
  if (s2 > 0) {
    auto& b2 = p.add_block("H2", s2);
    for (int r = 0; r < s2; ++r)
      for (int c = r; c < s2; ++c) {
        b2.A[r + c].add(r, c, 1.0);        // (1 - t^2): +t^{r+c}
        b2.A[r + c + 2].add(r, c, -1.0);   //            -t^{r+c+2}
      }
    for (int r = 0; r < s2; ++r) b2.C.add(r, r, -1.0);
  }

  SdpSolution sol = solve_sdp(p, opt);
  if (!sol.usable())
    throw std::runtime_error("fml_decompose: SOS feasibility SDP failed (" +
                             status_name(sol.status) + ": " + sol.message + ")");

  FmlResult out;
  out.gram1 = detail::floor_psd(sol.Y[0]);
  out.gram2 = s2 > 0 ? detail::floor_psd(sol.Y[1]) : Eigen::MatrixXd();
  out.h1 = detail::gram_to_poly(out.gram1);
  out.h2 = detail::gram_to_poly(out.gram2);
  UniPoly recon = out.h1 + UniPoly({1.0, 0.0, -1.0}) * out.h2;
  UniPoly diff = recon - h;
  for (int i = 0; i <= diff.degree(); ++i)
    out.residual = std::max(out.residual, std::abs(diff.coef(i)));
  return out;
}

}  // namespace pmsos

#pragma once

// Symmetric m x m matrices with multivariate polynomial entries: evaluation,
// symbolic matrix powers and trace polynomials, characteristic-polynomial
// coefficients via Faddeev-LeVerrier, scalar products against constant
// matrices, and the normalization that bounds the spectral radius by 1 on
// the reference domain.

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "pmsos/polynomial.hpp"
#include "pmsos/unipoly.hpp"

namespace pmsos {

class SymPolyMatrix {
 public:
  SymPolyMatrix() : n_(0), m_(0) {}
  SymPolyMatrix(int n, int m)
      : n_(n), m_(m), e_(m, std::vector<MultiPoly>(m, MultiPoly(n))) {
    if (n < 1 || m < 1)
      throw std::invalid_argument("SymPolyMatrix: need n >= 1, m >= 1");
  }

  static SymPolyMatrix identity(int n, int m) {
    SymPolyMatrix g(n, m);
    for (int i = 0; i < m; ++i) g.set(i, i, MultiPoly::constant(n, 1.0));
    return g;
  }

  int nvars() const { return n_; }
  int dim() const { return m_; }

  const MultiPoly& at(int i, int j) const { return e_.at(i).at(j); }
  // Assignment keeps the matrix symmetric.
  void set(int i, int j, const MultiPoly& p) {
    if (p.nvars() != n_)
      throw std::invalid_argument("SymPolyMatrix::set: variable mismatch");
    e_.at(i).at(j) = p;
    e_.at(j).at(i) = p;
  }

  int degree() const {
    int d = 0;
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) d = std::max(d, e_[i][j].degree());
    return std::max(d, 0);
  }

  // l = ceil(deg(G) / 2); a constant matrix is treated as degree-2 block
  // (l = 1) so localizer bookkeeping stays well defined.
  int half_degree() const { return std::max(1, (degree() + 1) / 2); }

  Eigen::MatrixXd eval(const std::vector<double>& x) const {
    Eigen::MatrixXd g(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = i; j < m_; ++j) g(i, j) = g(j, i) = e_[i][j].eval(x);
    return g;
  }

  double min_eigenvalue(const std::vector<double>& x) const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(eval(x));
    return es.eigenvalues().minCoeff();
  }

  SymPolyMatrix reduce_binary() const {
    SymPolyMatrix r(n_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = i; j < m_; ++j) r.set(i, j, e_[i][j].reduce_binary());
    return r;
  }

  SymPolyMatrix scaled(double s) const {
    SymPolyMatrix r(n_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = i; j < m_; ++j) r.set(i, j, e_[i][j] * s);
    return r;
  }

  // Sum over all entries of the l1 coefficient norm (off-diagonals counted
  // twice, i.e. the full double sum over i, j).
  double entry_norm_sum() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) s += e_[i][j].coef_norm();
    return s;
  }

  // Plain (non-symmetric) polynomial matrix product, used by the symbolic
  // power and Faddeev-LeVerrier routines.
  std::vector<std::vector<MultiPoly>> mul(
      const std::vector<std::vector<MultiPoly>>& b) const {
    std::vector<std::vector<MultiPoly>> r(
        m_, std::vector<MultiPoly>(m_, MultiPoly(n_)));
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j)
        for (int k = 0; k < m_; ++k) r[i][j] += e_[i][k] * b[k][j];
    return r;
  }

  std::vector<std::vector<MultiPoly>> as_rows() const { return e_; }

 private:
  int n_, m_;
  std::vector<std::vector<MultiPoly>> e_;
};

// tr(G(x)^p) as a polynomial; p = 0 gives the constant m.
inline MultiPoly trace_power(const SymPolyMatrix& g, int p) {
  if (p < 0) throw std::invalid_argument("trace_power: need p >= 0");
  const int n = g.nvars(), m = g.dim();
  if (p == 0) return MultiPoly::constant(n, static_cast<double>(m));
  auto pw = g.as_rows();
  for (int k = 1; k < p; ++k) pw = g.mul(pw);
  MultiPoly tr(n);
  for (int i = 0; i < m; ++i) tr += pw[i][i];
  return tr;
}

// <H, G^(powers)> for h given in the monomial basis:
// inner_h_G(h, G) = sum_k h_k tr(G^{k+1})  ... the scalar <h(G), G>.
inline MultiPoly inner_h_G(const UniPoly& h, const SymPolyMatrix& g) {
  MultiPoly out(g.nvars());
  const auto& c = h.coeffs();
  // Accumulate tr(G^{k+1}) incrementally to avoid repeated powers.
  auto pw = g.as_rows();
  for (size_t k = 0; k < c.size(); ++k) {
    if (k > 0) pw = g.mul(pw);
    if (c[k] == 0.0) continue;
    MultiPoly tr(g.nvars());
    for (int i = 0; i < g.dim(); ++i) tr += pw[i][i];
    out += tr * c[k];
  }
  return out;
}

// Chebyshev-form variant: <h(G), G> with h = sum_j a_j T_j, evaluated through
// the matrix three-term recurrence T_{j+1}(G) = 2 G T_j(G) - T_{j-1}(G).
inline MultiPoly inner_h_G(const ChebPoly& h, const SymPolyMatrix& g) {
  const int n = g.nvars(), m = g.dim();
  MultiPoly out(n);
  const auto& a = h.coeffs();
  if (a.empty()) return out;
  auto trace_of = [&](const std::vector<std::vector<MultiPoly>>& mat) {
    MultiPoly tr(n);
    for (int i = 0; i < m; ++i) tr += mat[i][i];
    return tr;
  };
  // T_j(G) * G accumulated directly: S_j = T_j(G) G obeys the same recurrence.
  auto s_prev = g.as_rows();          // T_0(G) G = G
  auto s_cur = g.mul(s_prev);         // T_1(G) G = G^2
  out += trace_of(s_prev) * a[0];
  if (a.size() > 1) out += trace_of(s_cur) * a[1];
  for (size_t j = 2; j < a.size(); ++j) {
    auto s_next = g.mul(s_cur);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k)
        s_next[i][k] = s_next[i][k] * 2.0 - s_prev[i][k];
    s_prev = std::move(s_cur);
    s_cur = std::move(s_next);
    out += trace_of(s_cur) * a[j];
  }
  return out;
}

// Coefficients c_1..c_m of det(tI - G) = t^m - c_1 t^{m-1} + c_2 t^{m-2} - ...
// (c_k = k-th elementary symmetric polynomial of the eigenvalues), via the
// Faddeev-LeVerrier recurrence.  G is PSD at x iff all c_k(x) >= 0.
inline std::vector<MultiPoly> charpoly_coeffs(const SymPolyMatrix& g) {
  const int n = g.nvars(), m = g.dim();
  if (m > 6)
    throw std::invalid_argument(
        "charpoly_coeffs: m > 6 unsupported (symbolic blow-up guard)");
  std::vector<MultiPoly> c;
  c.reserve(m);
  // M_1 = G, a_1 = -tr(M_1); M_k = G M_{k-1} + a_{k-1} G, a_k = -tr(M_k)/k.
  auto mk = g.as_rows();
  MultiPoly ak(n);
  for (int k = 1; k <= m; ++k) {
    if (k > 1) {
      auto gm = g.mul(mk);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) gm[i][j] += g.at(i, j) * ak;
      mk = std::move(gm);
    }
    MultiPoly tr(n);
    for (int i = 0; i < m; ++i) tr += mk[i][i];
    ak = tr * (-1.0 / k);
    c.push_back((k % 2 == 0) ? ak : -ak);  // c_k = (-1)^k a_k
  }
  return c;
}

struct NormalizeResult {
  SymPolyMatrix g;
  double scale = 1.0;  // original G divided by this
};

// Scale G so that its spectral radius is <= 1 on the reference domain
// (binary cube or unit ball of radius R): divide by
// sum_{i,j} ||g_ij||_1 * max(1, R^l).  A zero matrix passes through.
inline NormalizeResult normalize(const SymPolyMatrix& g, double radius = 1.0) {
  const double norm_sum = g.entry_norm_sum();
  double scale = norm_sum * std::max(1.0, std::pow(radius, g.half_degree()));
  if (scale <= 0.0) scale = 1.0;
  return {g.scaled(1.0 / scale), scale};
}

}  // namespace pmsos

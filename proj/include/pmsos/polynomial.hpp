#pragma once

// Sparse multivariate polynomials over double coefficients, stored as an
// ordered term map in graded-lex order.  Coefficients with |c| <= 1e-14 are
// pruned on every mutation so zero really means zero.

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmsos/monomial.hpp"

namespace pmsos {

constexpr double kCoefPruneTol = 1e-14;

class MultiPoly {
 public:
  using TermMap = std::map<Monomial, double, GrlexLess>;

  MultiPoly() : n_(0) {}
  explicit MultiPoly(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("MultiPoly: need n >= 1");
  }

  static MultiPoly constant(int n, double c) {
    MultiPoly p(n);
    p.add_term(Monomial::one(n), c);
    return p;
  }
  static MultiPoly variable(int n, int i) {
    MultiPoly p(n);
    p.add_term(Monomial::var(n, i), 1.0);
    return p;
  }
  static MultiPoly from_monomial(const Monomial& m, double c = 1.0) {
    MultiPoly p(m.nvars());
    p.add_term(m, c);
    return p;
  }

  int nvars() const { return n_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const {  // -1 for the zero polynomial
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }
  const TermMap& terms() const { return terms_; }
  size_t nterms() const { return terms_.size(); }

  double coef(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
  }

  void add_term(const Monomial& m, double c) {
    if (m.nvars() != n_)
      throw std::invalid_argument("MultiPoly: term variable count mismatch");
    auto [it, fresh] = terms_.try_emplace(m, 0.0);
    it->second += c;
    if (std::abs(it->second) <= kCoefPruneTol) terms_.erase(it);
  }

  MultiPoly& operator+=(const MultiPoly& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  MultiPoly& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    prune();
    return *this;
  }

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(MultiPoly a, double s) { return a *= s; }
  friend MultiPoly operator*(double s, MultiPoly a) { return a *= s; }
  friend MultiPoly operator-(MultiPoly a) { return a *= -1.0; }

  MultiPoly operator*(const MultiPoly& o) const {
    check_same(o);
    MultiPoly r(n_);
    for (const auto& [ma, ca] : terms_)
      for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }

  double eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_)
      throw std::invalid_argument("MultiPoly::eval: point dimension mismatch");
    double v = 0.0;
    for (const auto& [m, c] : terms_) {
      double t = c;
      for (int i = 0; i < n_; ++i)
        for (int e = 0; e < m.exp[i]; ++e) t *= x[i];
      v += t;
    }
    return v;
  }

  // l1 norm of the coefficient vector.
  double coef_norm() const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) s += std::abs(c);
    return s;
  }
  // max-norm of the coefficient vector.
  double coef_max() const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) s = std::max(s, std::abs(c));
    return s;
  }

  MultiPoly partial(int i) const {
    if (i < 0 || i >= n_) throw std::invalid_argument("partial: bad index");
    MultiPoly r(n_);
    for (const auto& [m, c] : terms_) {
      if (m.exp[i] == 0) continue;
      Monomial d = m;
      d.exp[i] -= 1;
      r.add_term(d, c * m.exp[i]);
    }
    return r;
  }

  // Reduction modulo the binary ideal (x_i^2 - x_i): every exponent collapses
  // to 0/1, coefficients of colliding monomials merge.
  MultiPoly reduce_binary() const {
    MultiPoly r(n_);
    for (const auto& [m, c] : terms_) r.add_term(m.squarefree_part(), c);
    return r;
  }

  bool operator==(const MultiPoly& o) const {
    return n_ == o.n_ && terms_ == o.terms_;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << (c >= 0 ? " + " : " - ");
      else if (c < 0) os << "-";
      os << std::abs(c);
      for (int i = 0; i < n_; ++i) {
        if (m.exp[i] == 0) continue;
        os << "*x" << (i + 1);
        if (m.exp[i] > 1) os << "^" << m.exp[i];
      }
      first = false;
    }
    return os.str();
  }

 private:
  void check_same(const MultiPoly& o) const {
    if (n_ != o.n_)
      throw std::invalid_argument("MultiPoly: variable count mismatch");
  }
  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = std::abs(it->second) <= kCoefPruneTol ? terms_.erase(it)
                                                 : std::next(it);
  }

  int n_;
  TermMap terms_;
};

// Index mapping between monomials and contiguous moment-variable indices.
// Full mode indexes all of N^n_{<=deg}; squarefree mode indexes square-free
// monomials only (degree cap min(deg, n)).  Order is graded-lex.
class MomentIndex {
 public:
  MomentIndex() = default;
  MomentIndex(int n, int deg, bool squarefree)
      : n_(n), deg_(deg), squarefree_(squarefree),
        basis_(monomial_basis(n, deg, squarefree)) {
    for (size_t i = 0; i < basis_.size(); ++i) pos_[basis_[i]] = i;
  }

  int nvars() const { return n_; }
  int max_degree() const { return deg_; }
  bool squarefree() const { return squarefree_; }
  size_t size() const { return basis_.size(); }
  const std::vector<Monomial>& basis() const { return basis_; }
  const Monomial& monomial(size_t i) const { return basis_.at(i); }

  size_t index(const Monomial& m) const {
    const Monomial key = squarefree_ ? m.squarefree_part() : m;
    auto it = pos_.find(key);
    if (it == pos_.end())
      throw std::out_of_range("MomentIndex: monomial outside indexed range");
    return it->second;
  }

  // Riesz functional of f as a sparse vector over this index: L_y(f) =
  // sum_a f_a y_a, with binary reduction applied first in squarefree mode.
  std::map<size_t, double> riesz(const MultiPoly& f) const {
    const MultiPoly g = squarefree_ ? f.reduce_binary() : f;
    std::map<size_t, double> out;
    for (const auto& [m, c] : g.terms()) out[index(m)] += c;
    return out;
  }

 private:
  int n_ = 0;
  int deg_ = 0;
  bool squarefree_ = false;
  std::vector<Monomial> basis_;
  std::map<Monomial, size_t, GrlexLess> pos_;
};

}  // namespace pmsos

#pragma once

// Monomials in n variables with the graded-lex order used everywhere in this
// library: lower total degree first, ties broken so that powers of x1 come
// before powers of x2, etc.  All bases, moment indexings and serialized terms
// follow this single order.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pmsos {

struct Monomial {
  std::vector<int> exp;

  Monomial() = default;
  explicit Monomial(std::vector<int> e) : exp(std::move(e)) {}
  static Monomial one(int n) { return Monomial(std::vector<int>(n, 0)); }
  static Monomial var(int n, int i) {
    Monomial m = one(n);
    m.exp.at(i) = 1;
    return m;
  }

  int nvars() const { return static_cast<int>(exp.size()); }
  int degree() const { return std::accumulate(exp.begin(), exp.end(), 0); }
  bool is_squarefree() const {
    return std::all_of(exp.begin(), exp.end(), [](int e) { return e <= 1; });
  }

  Monomial operator*(const Monomial& o) const {
    if (exp.size() != o.exp.size())
      throw std::invalid_argument("monomial product: variable count mismatch");
    Monomial r = *this;
    for (size_t i = 0; i < exp.size(); ++i) r.exp[i] += o.exp[i];
    return r;
  }

  // Replace every exponent >= 1 by 1 (reduction modulo x_i^2 = x_i).
  Monomial squarefree_part() const {
    Monomial r = *this;
    for (int& e : r.exp) e = e > 0 ? 1 : 0;
    return r;
  }

  bool operator==(const Monomial& o) const { return exp == o.exp; }
  bool operator!=(const Monomial& o) const { return exp != o.exp; }
};

// Graded-lex comparator: by degree, then lexicographic with x1 dominant
// (e.g. for n=2, degree 2: x1^2, x1*x2, x2^2).
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a.exp > b.exp;  // larger leading exponents sort first
  }
};

inline bool grlex_less(const Monomial& a, const Monomial& b) {
  return GrlexLess()(a, b);
}

// All monomials of degree <= r (or all square-free ones of degree <= r when
// squarefree is set), sorted in graded-lex order.
inline std::vector<Monomial> monomial_basis(int n, int r,
                                            bool squarefree = false) {
  if (n < 1) throw std::invalid_argument("monomial_basis: need n >= 1");
  if (r < 0) throw std::invalid_argument("monomial_basis: need r >= 0");
  std::vector<Monomial> out;
  std::vector<int> cur(n, 0);
  // Enumerate by total degree, then recursively split the degree over vars.
  const int cap = squarefree ? std::min(r, n) : r;
  for (int d = 0; d <= cap; ++d) {
    auto rec = [&](auto&& self, int var, int rem) -> void {
      if (var == n - 1) {
        if (squarefree && rem > 1) return;
        cur[var] = rem;
        out.emplace_back(cur);
        cur[var] = 0;
        return;
      }
      const int hi = squarefree ? std::min(rem, 1) : rem;
      for (int e = hi; e >= 0; --e) {  // x1-dominant within a degree
        cur[var] = e;
        self(self, var + 1, rem - e);
      }
      cur[var] = 0;
    };
    rec(rec, 0, d);
  }
  return out;
}

// s(n, r) = C(n + r, n), the dimension of polynomials of degree <= r.
inline long long basis_size(int n, int r) {
  if (r < 0) return 0;
  long long v = 1;
  for (int i = 1; i <= n; ++i) v = v * (r + i) / i;
  return v;
}

}  // namespace pmsos

#pragma once

// Dense univariate polynomials (monomial basis, ascending coefficients) and
// polynomials in Chebyshev-T form with Clenshaw evaluation and interpolation
// at Chebyshev points of the second kind.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace pmsos {

class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    trim();
  }
  static UniPoly constant(double v) { return UniPoly({v}); }
  static UniPoly t() { return UniPoly({0.0, 1.0}); }

  // degree of the zero polynomial is -1
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<double>& coeffs() const { return c_; }
  double coef(int i) const {
    return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : 0.0;
  }

  double eval(double t) const {  // Horner
    double v = 0.0;
    for (size_t i = c_.size(); i-- > 0;) v = v * t + c_[i];
    return v;
  }

  UniPoly derivative() const {
    if (c_.size() <= 1) return UniPoly();
    std::vector<double> d(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * i;
    return UniPoly(std::move(d));
  }

  UniPoly& operator+=(const UniPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  UniPoly& operator-=(const UniPoly& o) { return *this += o * -1.0; }
  UniPoly operator*(double s) const {
    UniPoly r = *this;
    for (double& v : r.c_) v *= s;
    r.trim();
    return r;
  }
  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator*(double s, const UniPoly& p) { return p * s; }

  UniPoly operator*(const UniPoly& o) const {
    if (c_.empty() || o.c_.empty()) return UniPoly();
    std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
    for (size_t i = 0; i < c_.size(); ++i)
      for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return UniPoly(std::move(r));
  }

  // Composition p(q(t)), by Horner over polynomials.
  UniPoly compose(const UniPoly& q) const {
    UniPoly r;
    for (size_t i = c_.size(); i-- > 0;) r = r * q + constant(c_[i]);
    return r;
  }

  double coef_norm() const {
    double s = 0;
    for (double v : c_) s += std::abs(v);
    return s;
  }

 private:
  void trim() {
    while (!c_.empty() && std::abs(c_.back()) <= 1e-14) c_.pop_back();
  }
  std::vector<double> c_;  // c_[i] multiplies t^i
};

// Polynomial in the Chebyshev basis: p(t) = sum_j a_j T_j(t) on [-1, 1].
class ChebPoly {
 public:
  ChebPoly() = default;
  explicit ChebPoly(std::vector<double> a) : a_(std::move(a)) {}

  int degree() const { return static_cast<int>(a_.size()) - 1; }
  const std::vector<double>& coeffs() const { return a_; }

  double eval(double t) const {  // Clenshaw recurrence
    if (a_.empty()) return 0.0;
    double b1 = 0.0, b2 = 0.0;
    for (size_t j = a_.size(); j-- > 1;) {
      const double b = a_[j] + 2.0 * t * b1 - b2;
      b2 = b1;
      b1 = b;
    }
    return a_[0] + t * b1 - b2;
  }

  // Expand into the monomial basis via the T_{k+1} = 2t T_k - T_{k-1}
  // recurrence.  Ill-conditioned for high degree (coefficients grow like
  // 2^deg); callers should stay below degree ~60.
  UniPoly to_unipoly() const {
    UniPoly sum;
    UniPoly tkm1 = UniPoly::constant(1.0);
    UniPoly tk = UniPoly::t();
    for (size_t j = 0; j < a_.size(); ++j) {
      const UniPoly& tj = (j == 0) ? tkm1 : tk;
      sum += tj * a_[j];
      if (j >= 1) {
        UniPoly tnext = UniPoly::t() * tk * 2.0 - tkm1;
        tkm1 = tk;
        tk = tnext;
      }
    }
    return sum;
  }

  // Interpolant of f at the v+1 Chebyshev points of the second kind
  // x_i = cos(i*pi/v), via the O(v^2) discrete cosine sums.
  static ChebPoly interpolate(const std::function<double(double)>& f, int v) {
    if (v < 1) {
      if (v != 0) throw std::invalid_argument("interpolate: need v >= 0");
      return ChebPoly({f(1.0)});
    }
    const double pi = std::acos(-1.0);
    std::vector<double> fx(v + 1);
    for (int i = 0; i <= v; ++i) fx[i] = f(std::cos(i * pi / v));
    std::vector<double> a(v + 1, 0.0);
    for (int j = 0; j <= v; ++j) {
      double s = 0.5 * (fx[0] + (j % 2 == 0 ? fx[v] : -fx[v]));
      for (int i = 1; i < v; ++i) s += fx[i] * std::cos(j * i * pi / v);
      a[j] = 2.0 * s / v;
    }
    a[0] *= 0.5;
    a[v] *= 0.5;
    return ChebPoly(std::move(a));
  }

  static std::vector<double> nodes(int v) {
    const double pi = std::acos(-1.0);
    std::vector<double> x(v + 1);
    for (int i = 0; i <= v; ++i) x[i] = std::cos(i * pi / v);
    return x;
  }

 private:
  std::vector<double> a_;
};

}  // namespace pmsos

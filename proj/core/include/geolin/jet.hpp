#pragma once

#include <cstdint>
#include <vector>

namespace geolin {

/// Truncated multivariate Taylor scalar: value plus all partial
/// derivatives through order 3, propagated exactly through arithmetic
/// and the elementary functions. Coefficients are stored once per
/// sorted multi-index in graded lexicographic order, scaled as Taylor
/// coefficients (derivative divided by the multi-index factorial).
class Jet {
 public:
  static constexpr int kMaxVars = 16;
  static constexpr int kOrder = 3;

  explicit Jet(int nvars);
  static Jet constant(int nvars, double v);
  static Jet variable(int nvars, int i, double v);

  int vars() const { return n_; }
  int size() const { return static_cast<int>(c_.size()); }

  double value() const { return c_[0]; }

  /// Partial derivatives (factorial scaling undone).
  double d1(int i) const;
  double d2(int i, int j) const;
  double d3(int i, int j, int k) const;

  /// Raw Taylor coefficient access by slot.
  double coeff(int slot) const { return c_[slot]; }
  double& coeff(int slot) { return c_[slot]; }

  /// The jet of the partial derivative with respect to variable i.
  /// Valid one order lower than the input; order-3 slots are zero.
  Jet derivative(int i) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double b) { return a += b; }
  friend Jet operator+(double a, Jet b) { return b += a; }
  friend Jet operator-(Jet a, double b) { return a -= b; }
  friend Jet operator-(double a, const Jet& b) { Jet r = -b; return r += a; }
  friend Jet operator*(Jet a, double b) { return a *= b; }
  friend Jet operator*(double a, Jet b) { return b *= a; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator/(Jet a, double b) { return a *= 1.0 / b; }
  friend Jet operator/(double a, const Jet& b);

 private:
  int n_;
  std::vector<double> c_;
};

/// Taylor composition f(u) from the first four derivatives of f at u.value().
Jet jet_compose(const Jet& u, double f0, double f1, double f2, double f3);

Jet jet_recip(const Jet& u);  // throws NumericError on zero value
Jet jet_exp(const Jet& u);
Jet jet_log(const Jet& u);    // throws NumericError on non-positive value
Jet jet_sin(const Jet& u);
Jet jet_cos(const Jet& u);
Jet jet_sqrt(const Jet& u);   // throws NumericError on non-positive value
Jet jet_pow(const Jet& u, double c);

namespace jet_detail {

inline int size_for(int n) {
  return 1 + n + n * (n + 1) / 2 + n * (n + 1) * (n + 2) / 6;
}
inline int idx1(int /*n*/, int i) { return 1 + i; }
inline int idx2(int n, int i, int j) {  // requires i <= j
  return 1 + n + i * n - i * (i - 1) / 2 + (j - i);
}
inline int idx3(int n, int i, int j, int k) {  // requires i <= j <= k
  int off = 1 + n + n * (n + 1) / 2;
  for (int a = 0; a < i; ++a) {
    int m = n - a;
    off += m * (m + 1) / 2;
  }
  int m = n - i, jj = j - i, kk = k - i;
  return off + jj * m - jj * (jj - 1) / 2 + (kk - jj);
}

}  // namespace jet_detail

}  // namespace geolin

#include "geolin/jet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include "geolin/errors.hpp"

namespace geolin {

using jet_detail::idx1;
using jet_detail::idx2;
using jet_detail::idx3;
using jet_detail::size_for;

namespace {

// Per-dimension slot layout: degree and sorted variable tuple per slot.
struct Layout {
  int n = 0;
  std::vector<std::array<std::int8_t, 4>> tup;  // {deg, v0, v1, v2}

  explicit Layout(int nn) : n(nn) {
    tup.assign(size_for(n), {0, -1, -1, -1});
    for (int i = 0; i < n; ++i) tup[idx1(n, i)] = {1, (std::int8_t)i, -1, -1};
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        tup[idx2(n, i, j)] = {2, (std::int8_t)i, (std::int8_t)j, -1};
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = j; k < n; ++k)
          tup[idx3(n, i, j, k)] = {3, (std::int8_t)i, (std::int8_t)j,
                                   (std::int8_t)k};
  }

  int merge(int sa, int sb) const {
    const auto& a = tup[sa];
    const auto& b = tup[sb];
    int d = a[0] + b[0];
    std::array<std::int8_t, 3> v{};
    int c = 0;
    for (int t = 0; t < a[0]; ++t) v[c++] = a[1 + t];
    for (int t = 0; t < b[0]; ++t) v[c++] = b[1 + t];
    std::sort(v.begin(), v.begin() + c);
    switch (d) {
      case 0: return 0;
      case 1: return idx1(n, v[0]);
      case 2: return idx2(n, v[0], v[1]);
      default: return idx3(n, v[0], v[1], v[2]);
    }
  }
};

const Layout& layout(int n) {
  static std::vector<Layout> cache = [] {
    std::vector<Layout> v;
    v.reserve(Jet::kMaxVars + 1);
    for (int n = 0; n <= Jet::kMaxVars; ++n) v.emplace_back(n);
    return v;
  }();
  return cache[n];
}

}  // namespace

Jet::Jet(int nvars) : n_(nvars), c_(size_for(nvars), 0.0) {
  if (nvars < 0 || nvars > kMaxVars)
    throw NumericError("jet variable count out of range");
}

Jet Jet::constant(int nvars, double v) {
  Jet j(nvars);
  j.c_[0] = v;
  return j;
}

Jet Jet::variable(int nvars, int i, double v) {
  Jet j(nvars);
  j.c_[0] = v;
  j.c_[idx1(nvars, i)] = 1.0;
  return j;
}

double Jet::d1(int i) const { return c_[idx1(n_, i)]; }

double Jet::d2(int i, int j) const {
  if (i > j) std::swap(i, j);
  double fact = (i == j) ? 2.0 : 1.0;
  return c_[idx2(n_, i, j)] * fact;
}

double Jet::d3(int i, int j, int k) const {
  std::array<int, 3> v{i, j, k};
  std::sort(v.begin(), v.end());
  double fact = 1.0;
  if (v[0] == v[1] && v[1] == v[2]) fact = 6.0;
  else if (v[0] == v[1] || v[1] == v[2]) fact = 2.0;
  return c_[idx3(n_, v[0], v[1], v[2])] * fact;
}

Jet Jet::derivative(int i) const {
  Jet r(n_);
  r.c_[0] = c_[idx1(n_, i)];
  for (int j = 0; j < n_; ++j) {
    int lo = std::min(i, j), hi = std::max(i, j);
    double mult = (i == j) ? 2.0 : 1.0;
    r.c_[idx1(n_, j)] = c_[idx2(n_, lo, hi)] * mult;
  }
  for (int j = 0; j < n_; ++j) {
    for (int k = j; k < n_; ++k) {
      std::array<int, 3> v{i, j, k};
      std::sort(v.begin(), v.end());
      // multiplicity of i in (i,j,k)
      double mult = 1.0 + (i == j ? 1.0 : 0.0) + (i == k ? 1.0 : 0.0);
      r.c_[idx2(n_, j, k)] = c_[idx3(n_, v[0], v[1], v[2])] * mult;
    }
  }
  return r;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (double& x : r.c_) x = -x;
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  for (int s = 0; s < size(); ++s) c_[s] += o.c_[s];
  return *this;
}
Jet& Jet::operator-=(const Jet& o) {
  for (int s = 0; s < size(); ++s) c_[s] -= o.c_[s];
  return *this;
}
Jet& Jet::operator+=(double s) {
  c_[0] += s;
  return *this;
}
Jet& Jet::operator-=(double s) {
  c_[0] -= s;
  return *this;
}
Jet& Jet::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const Layout& L = layout(a.n_);
  Jet r(a.n_);
  const int sz = a.size();
  for (int sa = 0; sa < sz; ++sa) {
    double ca = a.c_[sa];
    if (ca == 0.0) continue;
    int da = L.tup[sa][0];
    for (int sb = 0; sb < sz; ++sb) {
      double cb = b.c_[sb];
      if (cb == 0.0) continue;
      if (da + L.tup[sb][0] > Jet::kOrder) continue;
      r.c_[L.merge(sa, sb)] += ca * cb;
    }
  }
  return r;
}

Jet jet_compose(const Jet& u, double f0, double f1, double f2, double f3) {
  Jet w = u;
  w.coeff(0) = 0.0;
  // Horner in w: f0 + w*(f1 + w*(f2/2 + w*f3/6))
  Jet r = w * (f3 / 6.0);
  r += f2 / 2.0;
  r = w * r;
  r += f1;
  r = w * r;
  r += f0;
  return r;
}

Jet jet_recip(const Jet& u) {
  double v = u.value();
  if (v == 0.0) throw NumericError("reciprocal of zero");
  double iv = 1.0 / v;
  return jet_compose(u, iv, -iv * iv, 2.0 * iv * iv * iv,
                     -6.0 * iv * iv * iv * iv);
}

Jet operator/(const Jet& a, const Jet& b) { return a * jet_recip(b); }
Jet operator/(double a, const Jet& b) { return jet_recip(b) * a; }

Jet jet_exp(const Jet& u) {
  double e = std::exp(u.value());
  return jet_compose(u, e, e, e, e);
}

Jet jet_log(const Jet& u) {
  double v = u.value();
  if (v <= 0.0) throw NumericError("ln of non-positive argument");
  double iv = 1.0 / v;
  return jet_compose(u, std::log(v), iv, -iv * iv, 2.0 * iv * iv * iv);
}

Jet jet_sin(const Jet& u) {
  double s = std::sin(u.value()), c = std::cos(u.value());
  return jet_compose(u, s, c, -s, -c);
}

Jet jet_cos(const Jet& u) {
  double s = std::sin(u.value()), c = std::cos(u.value());
  return jet_compose(u, c, -s, -c, s);
}

Jet jet_sqrt(const Jet& u) {
  double v = u.value();
  if (v <= 0.0) throw NumericError("sqrt of non-positive argument");
  double s = std::sqrt(v);
  double f1 = 0.5 / s;
  double f2 = -0.25 / (v * s);
  double f3 = 0.375 / (v * v * s);
  return jet_compose(u, s, f1, f2, f3);
}

Jet jet_pow(const Jet& u, double c) {
  double rc = std::round(c);
  if (rc == c && std::abs(c) <= 64.0) {
    long e = static_cast<long>(rc);
    if (e == 0) return Jet::constant(u.vars(), 1.0);
    bool neg = e < 0;
    e = std::labs(e);
    Jet acc = Jet::constant(u.vars(), 1.0);
    Jet base = u;
    while (e > 0) {
      if (e & 1) acc = acc * base;
      e >>= 1;
      if (e) base = base * base;
    }
    return neg ? jet_recip(acc) : acc;
  }
  double v = u.value();
  if (v <= 0.0) throw NumericError("non-integer power of non-positive base");
  double f0 = std::pow(v, c);
  double f1 = c * f0 / v;
  double f2 = c * (c - 1.0) * f0 / (v * v);
  double f3 = c * (c - 1.0) * (c - 2.0) * f0 / (v * v * v);
  return jet_compose(u, f0, f1, f2, f3);
}

}  // namespace geolin

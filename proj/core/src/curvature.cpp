#include "geolin/curvature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "geolin/errors.hpp"
#include "json.hpp"

namespace geolin {

namespace {

constexpr double kEps = 1e-300;

Jet jet_abs(const Jet& u) {
  Jet r = u;
  for (int s = 0; s < r.size(); ++s) r.coeff(s) = std::abs(r.coeff(s));
  return r;
}

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::vector<Jet> MetricField::eval_jets(std::span<const double> p) const {
  const int n = dim();
  std::vector<Jet> out;
  out.reserve(n * n);
  for (const Expr& e : comp) out.push_back(eval_jet(e, p, coords, params));
  return out;
}

std::vector<double> MetricField::eval_values(std::span<const double> p) const {
  std::map<std::string, double> env = params;
  for (int i = 0; i < dim(); ++i) env[coords[i]] = p[i];
  std::vector<double> out;
  out.reserve(comp.size());
  for (const Expr& e : comp) out.push_back(eval_scalar(e, env));
  return out;
}

double MetricField::det_at(std::span<const double> p) const {
  const int n = dim();
  std::vector<double> v = eval_values(p);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v[i * n + j];
  return m.partialPivLu().determinant();
}

MetricField diagonal_metric(const std::vector<std::string>& coords,
                            const std::vector<double>& diag) {
  MetricField m;
  m.coords = coords;
  const int n = m.dim();
  m.comp.assign(n * n, ex::constant(0.0));
  for (int i = 0; i < n; ++i) m.at(i, i) = ex::constant(diag[i]);
  return m;
}

CurvatureEval::CurvatureEval(const MetricField& m, std::span<const double> p)
    : n_(m.dim()),
      point_(p.begin(), p.end()),
      rs_(Jet::constant(m.dim(), 0.0)),
      rs_abs_(Jet::constant(m.dim(), 0.0)) {
  const int n = n_;
  g_ = m.eval_jets(p);

  // Inverse metric by Gauss-Jordan elimination over jets, pivoting on
  // component values.
  std::vector<Jet> a = g_;
  ginv_.assign(n * n, Jet::constant(n, 0.0));
  for (int i = 0; i < n; ++i) ginv_[i * n + i] = Jet::constant(n, 1.0);
  double gmax = 0.0;
  for (const Jet& j : a) gmax = std::max(gmax, std::abs(j.value()));
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int r = k + 1; r < n; ++r)
      if (std::abs(a[r * n + k].value()) > std::abs(a[piv * n + k].value()))
        piv = r;
    if (std::abs(a[piv * n + k].value()) <= 1e-14 * std::max(gmax, 1e-30))
      throw NumericError("singular metric at evaluation point");
    if (piv != k)
      for (int c = 0; c < n; ++c) {
        std::swap(a[piv * n + c], a[k * n + c]);
        std::swap(ginv_[piv * n + c], ginv_[k * n + c]);
      }
    Jet inv = jet_recip(a[k * n + k]);
    for (int c = 0; c < n; ++c) {
      a[k * n + c] = a[k * n + c] * inv;
      ginv_[k * n + c] = ginv_[k * n + c] * inv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == k) continue;
      Jet f = a[r * n + k];
      if (f.value() == 0.0) {
        bool zero = true;
        for (int s = 0; s < f.size(); ++s)
          if (f.coeff(s) != 0.0) { zero = false; break; }
        if (zero) continue;
      }
      for (int c = 0; c < n; ++c) {
        a[r * n + c] -= f * a[k * n + c];
        ginv_[r * n + c] -= f * ginv_[k * n + c];
      }
    }
  }

  gamma_.assign(n * n * n, Jet::constant(n, 0.0));
  gamma_abs_.assign(n * n * n, Jet::constant(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        Jet s = Jet::constant(n, 0.0);
        Jet sa = Jet::constant(n, 0.0);
        for (int l = 0; l < n; ++l) {
          Jet t = g_[l * n + j].derivative(k) + g_[l * n + k].derivative(j) -
                  g_[j * n + k].derivative(l);
          Jet ta = jet_abs(g_[l * n + j].derivative(k)) +
                   jet_abs(g_[l * n + k].derivative(j)) +
                   jet_abs(g_[j * n + k].derivative(l));
          s += ginv_[i * n + l] * t;
          sa += jet_abs(ginv_[i * n + l]) * ta;
        }
        s *= 0.5;
        sa *= 0.5;
        gamma_[(i * n + j) * n + k] = s;
        gamma_[(i * n + k) * n + j] = s;
        gamma_abs_[(i * n + j) * n + k] = sa;
        gamma_abs_[(i * n + k) * n + j] = sa;
      }

  // Curvature jets carry one valid derivative order (enough for the
  // covariant derivatives in the Cotton tensor). The shadow arrays
  // accumulate |term| coefficients alongside, giving the roundoff scale
  // against which "this component is zero" is judged.
  riem_.assign(n * n * n * n, Jet::constant(n, 0.0));
  riem_abs_.assign(n * n * n * n, Jet::constant(n, 0.0));
  auto G = [&](int i, int j, int k) -> const Jet& {
    return gamma_[(i * n + j) * n + k];
  };
  auto Ga = [&](int i, int j, int k) -> const Jet& {
    return gamma_abs_[(i * n + j) * n + k];
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          Jet t1 = G(i, l, j).derivative(k);
          Jet t2 = G(i, k, j).derivative(l);
          Jet r = t1 - t2;
          Jet ab = Ga(i, l, j).derivative(k) + Ga(i, k, j).derivative(l);
          for (int mIdx = 0; mIdx < n; ++mIdx) {
            Jet p1 = G(i, k, mIdx) * G(mIdx, l, j);
            Jet p2 = G(i, l, mIdx) * G(mIdx, k, j);
            r += p1 - p2;
            ab += Ga(i, k, mIdx) * Ga(mIdx, l, j) +
                  Ga(i, l, mIdx) * Ga(mIdx, k, j);
          }
          riem_[((i * n + j) * n + k) * n + l] = r;
          riem_[((i * n + j) * n + l) * n + k] = -r;
          riem_abs_[((i * n + j) * n + k) * n + l] = ab;
          riem_abs_[((i * n + j) * n + l) * n + k] = ab;
        }

  ric_.assign(n * n, Jet::constant(n, 0.0));
  ric_abs_.assign(n * n, Jet::constant(n, 0.0));
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i) {
        ric_[j * n + l] += riem_[((i * n + j) * n + i) * n + l];
        ric_abs_[j * n + l] += riem_abs_[((i * n + j) * n + i) * n + l];
      }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      rs_ += ginv_[i * n + j] * ric_[i * n + j];
      rs_abs_ += jet_abs(ginv_[i * n + j]) * ric_abs_[i * n + j];
    }

  rlow_.assign(n * n * n * n, 0.0);
  rlow_abs_.assign(n * n * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0, sa = 0.0;
          for (int r = 0; r < n; ++r) {
            s += g_[i * n + r].value() * riem_[((r * n + j) * n + k) * n + l].value();
            sa += std::abs(g_[i * n + r].value()) *
                  riem_abs_[((r * n + j) * n + k) * n + l].value();
          }
          rlow_[((i * n + j) * n + k) * n + l] = s;
          rlow_abs_[((i * n + j) * n + k) * n + l] = sa;
        }

  // Orthonormal frame from the eigendecomposition of g, eigenvalues
  // ascending; indefinite signatures give eta entries of -1.
  Eigen::MatrixXd gm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gm(i, j) = g_[i * n + j].value();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gm);
  double lmax = 0.0;
  for (int a = 0; a < n; ++a) lmax = std::max(lmax, std::abs(es.eigenvalues()[a]));
  frame_.assign(n * n, 0.0);
  eta_.assign(n, 0.0);
  for (int a = 0; a < n; ++a) {
    double lam = es.eigenvalues()[a];
    if (std::abs(lam) <= 1e-12 * std::max(lmax, 1e-30))
      throw NumericError("singular metric at evaluation point");
    double s = 1.0 / std::sqrt(std::abs(lam));
    eta_[a] = lam > 0.0 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) frame_[i * n + a] = es.eigenvectors()(i, a) * s;
  }
}

std::vector<double> CurvatureEval::frame_components(std::span<const double> t,
                                                    int rank,
                                                    bool absolute) const {
  const int n = n_;
  std::vector<double> cur(t.begin(), t.end());
  std::vector<double> nxt(cur.size());
  int stride = 1;
  for (int r = 1; r < rank; ++r) stride *= n;
  // Each pass contracts the leading index with the frame and cycles it
  // to the back; `rank` passes restore the index order.
  for (int pass = 0; pass < rank; ++pass) {
    for (int rest = 0; rest < stride; ++rest)
      for (int a = 0; a < n; ++a) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
          double e = frame_[i * n + a];
          if (absolute) e = std::abs(e);
          s += e * cur[i * stride + rest];
        }
        nxt[rest * n + a] = s;
      }
    cur.swap(nxt);
  }
  return cur;
}

double CurvatureEval::frame_norm(std::span<const double> t, int rank) const {
  return l2(frame_components(t, rank, false));
}

double CurvatureEval::frame_norm_abs(std::span<const double> t, int rank) const {
  return l2(frame_components(t, rank, true));
}

void CurvatureEval::cotton_terms(std::vector<double>& c,
                                 std::vector<double>& scale) const {
  const int n = n_;
  // Covariant derivative of Ricci, cov[m][nu][k] = Ric_{m nu ; k}, with a
  // matching term-magnitude shadow.
  std::vector<double> cov(n * n * n, 0.0), cova(n * n * n, 0.0);
  for (int mIdx = 0; mIdx < n; ++mIdx)
    for (int nu = 0; nu < n; ++nu)
      for (int k = 0; k < n; ++k) {
        double s = ric_[mIdx * n + nu].d1(k);
        double sa = ric_abs_[mIdx * n + nu].d1(k);
        for (int l = 0; l < n; ++l) {
          double g1 = gamma_[(l * n + k) * n + mIdx].value();
          double g2 = gamma_[(l * n + k) * n + nu].value();
          s -= g1 * ric_[l * n + nu].value() + g2 * ric_[mIdx * n + l].value();
          sa += gamma_abs_[(l * n + k) * n + mIdx].value() *
                    ric_abs_[l * n + nu].value() +
                gamma_abs_[(l * n + k) * n + nu].value() *
                    ric_abs_[mIdx * n + l].value();
        }
        cov[(mIdx * n + nu) * n + k] = s;
        cova[(mIdx * n + nu) * n + k] = sa;
      }
  c.assign(n * n * n, 0.0);
  scale.assign(n * n * n, 0.0);
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu)
      for (int k = 0; k < n; ++k) {
        // The scalar-gradient indices must pair with the antisymmetric
        // slots {mu, k}, otherwise the tensor fails to vanish on
        // conformally flat metrics.
        double gkn = g_[k * n + nu].value();
        double gmn = g_[mu * n + nu].value();
        c[(mu * n + nu) * n + k] =
            cov[(mu * n + nu) * n + k] - cov[(k * n + nu) * n + mu] +
            0.25 * (rs_.d1(mu) * gkn - rs_.d1(k) * gmn);
        scale[(mu * n + nu) * n + k] =
            cova[(mu * n + nu) * n + k] + cova[(k * n + nu) * n + mu] +
            0.25 * (rs_abs_.d1(mu) * std::abs(gkn) +
                    rs_abs_.d1(k) * std::abs(gmn));
      }
}

std::vector<double> CurvatureEval::cotton() const {
  if (n_ != 3) throw NumericError("Cotton tensor requires dimension 3");
  std::vector<double> c, scale;
  cotton_terms(c, scale);
  return c;
}

double CurvatureEval::cotton_norm() const {
  if (n_ != 3) throw NumericError("Cotton tensor requires dimension 3");
  std::vector<double> c, scale;
  cotton_terms(c, scale);
  return frame_norm(c, 3) / (frame_norm_abs(scale, 3) + kEps);
}

std::vector<double> CurvatureEval::weyl() const {
  const int n = n_;
  if (n < 4) throw NumericError("Weyl tensor requires dimension >= 4");
  std::vector<double> w(n * n * n * n, 0.0);
  double rsv = rs_.value();
  double c2 = 1.0 / (n - 2);
  double c3 = rsv / ((n - 1.0) * (n - 2.0));
  auto gval = [&](int i, int j) { return g_[i * n + j].value(); };
  auto rval = [&](int i, int j) { return ric_[i * n + j].value(); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double t2 = gval(i, k) * rval(l, j) - gval(i, l) * rval(k, j) -
                      gval(j, k) * rval(l, i) + gval(j, l) * rval(k, i);
          double t3 = gval(i, k) * gval(l, j) - gval(i, l) * gval(k, j);
          w[((i * n + j) * n + k) * n + l] =
              rlow_[((i * n + j) * n + k) * n + l] - c2 * t2 + c3 * t3;
        }
  return w;
}

double CurvatureEval::weyl_norm() const {
  std::vector<double> w = weyl();
  return frame_norm(w, 4) /
         (frame_norm(rlow_, 4) + frame_norm_abs(rlow_abs_, 4) + kEps);
}

std::pair<double, double> CurvatureEval::constant_curvature() const {
  const int n = n_;
  if (n < 2) throw NumericError("constant-curvature test requires dimension >= 2");
  double K = rs_.value() / (n * (n - 1.0));
  std::vector<double> rf = frame_components(rlow_, 4, false);
  double num = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double model = 0.0;
          if (a == c && b == d) model += K * eta_[a] * eta_[b];
          if (a == d && b == c) model -= K * eta_[a] * eta_[b];
          double diff = rf[((a * n + b) * n + c) * n + d] - model;
          num += diff * diff;
        }
  double denom = l2(rf) + std::abs(K) * n + frame_norm_abs(rlow_abs_, 4) + kEps;
  return {K, std::sqrt(num) / denom};
}

double CurvatureEval::bianchi_residual() const {
  const int n = n_;
  std::vector<double> b(n * n * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          b[((i * n + j) * n + k) * n + l] =
              rlow_[((i * n + j) * n + k) * n + l] +
              rlow_[((i * n + k) * n + l) * n + j] +
              rlow_[((i * n + l) * n + j) * n + k];
  return frame_norm(b, 4) /
         (frame_norm(rlow_, 4) + frame_norm_abs(rlow_abs_, 4) + kEps);
}

CurvatureReport curvature_report(const MetricField& m, std::span<const double> p,
                                 bool verbose_tensors) {
  CurvatureEval ev(m, p);
  const int n = ev.dim();
  CurvatureReport rep;
  rep.point.assign(p.begin(), p.end());
  rep.ricci_scalar = ev.ricci_scalar().value();
  auto [K, res] = n >= 2 ? ev.constant_curvature() : std::pair<double, double>{0.0, 0.0};
  rep.K = K;
  rep.max_sym_residual = res;
  if (n == 3) rep.cotton_norm = ev.cotton_norm();
  if (n >= 4) rep.weyl_norm = ev.weyl_norm();
  if (verbose_tensors) {
    rep.gamma.resize(n * n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          rep.gamma[(i * n + j) * n + k] = ev.gamma(i, j, k).value();
    rep.riemann_low.resize(n * n * n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            rep.riemann_low[((i * n + j) * n + k) * n + l] =
                ev.riemann_low(i, j, k, l);
    rep.ricci.resize(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rep.ricci[i * n + j] = ev.ricci(i, j).value();
    if (n == 3) rep.cotton = ev.cotton();
    if (n >= 4) rep.weyl = ev.weyl();
  }
  return rep;
}

std::string CurvatureReport::to_json(bool verbose) const {
  nlohmann::ordered_json j;
  j["point"] = point;
  j["K"] = K;
  nlohmann::ordered_json res;
  res["max_sym"] = max_sym_residual;
  if (cotton_norm >= 0.0) res["cotton"] = cotton_norm;
  else res["cotton"] = nullptr;
  if (weyl_norm >= 0.0) res["weyl"] = weyl_norm;
  else res["weyl"] = nullptr;
  j["residuals"] = res;
  j["R"] = ricci_scalar;
  if (verbose) {
    nlohmann::ordered_json t;
    t["gamma"] = gamma;
    t["riemann_low"] = riemann_low;
    t["ricci"] = ricci;
    if (!cotton.empty()) t["cotton"] = cotton;
    if (!weyl.empty()) t["weyl"] = weyl;
    j["tensors"] = t;
  }
  return j.dump(2);
}

double liouville_residual(const Expr& U, double kappa, double x, double y,
                          const std::array<std::string, 2>& coords,
                          const std::map<std::string, double>& params) {
  double p[2] = {x, y};
  std::vector<std::string> vars{coords[0], coords[1]};
  Jet u = eval_jet(U, p, vars, params);
  return u.d2(0, 0) + u.d2(1, 1) + 2.0 * kappa * std::exp(2.0 * u.value());
}

}  // namespace geolin

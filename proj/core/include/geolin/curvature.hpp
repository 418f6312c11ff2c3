#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geolin/jet.hpp"
#include "geolin/metric.hpp"

namespace geolin {

/// Pointwise curvature of a metric field, evaluated with jet-valued
/// components so every derivative through third order is exact to
/// machine precision.
///
/// Convention: R^r_smn = d_m Gamma^r_ns - d_n Gamma^r_ms
///                       + Gamma^r_ml Gamma^l_ns - Gamma^r_nl Gamma^l_ms,
/// with Ricci_mn = R^l_mln. This choice reproduces the closed-form Ricci
/// scalar of the Szekeres system with cosmological constant, sign included
/// (pinned by an acceptance test).
class CurvatureEval {
 public:
  CurvatureEval(const MetricField& m, std::span<const double> p);

  int dim() const { return n_; }
  std::span<const double> point() const { return point_; }

  const Jet& metric(int i, int j) const { return g_[i * n_ + j]; }
  const Jet& inverse_metric(int i, int j) const { return ginv_[i * n_ + j]; }
  const Jet& gamma(int i, int j, int k) const {
    return gamma_[(i * n_ + j) * n_ + k];
  }
  /// R^i_jkl with first-derivative payload.
  const Jet& riemann(int i, int j, int k, int l) const {
    return riem_[((i * n_ + j) * n_ + k) * n_ + l];
  }
  double riemann_low(int i, int j, int k, int l) const {
    return rlow_[((i * n_ + j) * n_ + k) * n_ + l];
  }
  const Jet& ricci(int i, int j) const { return ric_[i * n_ + j]; }
  const Jet& ricci_scalar() const { return rs_; }

  /// Cotton-York components C_mnk = Ric_mn;k - Ric_kn;m
  ///                                + (1/4)(R_,n g_mk - R_,k g_mn).
  /// Requires dim == 3.
  std::vector<double> cotton() const;
  double cotton_norm() const;  // normalized, in orthonormal frame

  /// Weyl components (fully lowered). Requires dim >= 4.
  std::vector<double> weyl() const;
  double weyl_norm() const;  // normalized, in orthonormal frame

  /// (K, residual) of R_ijkl = K (g_ik g_jl - g_il g_jk), K = R/(n(n-1)),
  /// measured in an orthonormal frame. Requires dim >= 2.
  std::pair<double, double> constant_curvature() const;

  /// First-Bianchi residual of the lowered Riemann, frame-normalized.
  double bianchi_residual() const;

  /// Orthonormal-frame Euclidean norm of a fully covariant tensor given
  /// as a flat array with `rank` indices of extent dim.
  double frame_norm(std::span<const double> tensor, int rank) const;

 private:
  double frame_norm_abs(std::span<const double> tensor, int rank) const;
  std::vector<double> frame_components(std::span<const double> tensor, int rank,
                                       bool absolute) const;
  void cotton_terms(std::vector<double>& c, std::vector<double>& scale) const;

  int n_;
  std::vector<double> point_;
  std::vector<Jet> g_, ginv_, gamma_, riem_, ric_;
  // Cancellation-scale shadows: the same contractions evaluated on
  // absolute-valued jets, so that a numerically tiny component can be
  // judged against the magnitude of the terms that cancelled to make it.
  std::vector<Jet> gamma_abs_, riem_abs_, ric_abs_;
  Jet rs_, rs_abs_;
  std::vector<double> rlow_, rlow_abs_;
  std::vector<double> frame_;  // n*n, column a = eigvec_a / sqrt(|lambda_a|)
  std::vector<double> eta_;    // frame metric diagonal (+-1)
};

struct CurvatureReport {
  std::vector<double> point;
  double ricci_scalar = 0.0;
  double K = 0.0;
  double max_sym_residual = 0.0;
  double cotton_norm = -1.0;  // -1 when not applicable
  double weyl_norm = -1.0;
  std::vector<double> gamma, riemann_low, ricci, cotton, weyl;
  std::string to_json(bool verbose) const;
};

CurvatureReport curvature_report(const MetricField& m, std::span<const double> p,
                                 bool verbose_tensors = false);

/// Residual of U_xx + U_yy + 2 kappa exp(2U) at (x, y); zero means the
/// metric exp(2U) * delta has constant curvature kappa.
double liouville_residual(const Expr& U, double kappa, double x, double y,
                          const std::array<std::string, 2>& coords,
                          const std::map<std::string, double>& params);

}  // namespace geolin

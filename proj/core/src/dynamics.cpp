#include "geolin/dynamics.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>

#include "geolin/errors.hpp"

namespace geolin {

namespace {

// Constant-folding expression builders; they keep the symbolic inverse
// metric from drowning in 0-products.
bool cval(const Expr& e, double v) {
  return e->kind == NodeKind::Constant && e->value == v;
}
Expr sadd(const Expr& a, const Expr& b) {
  if (cval(a, 0.0)) return b;
  if (cval(b, 0.0)) return a;
  if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant)
    return ex::constant(a->value + b->value);
  return ex::add(a, b);
}
Expr ssub(const Expr& a, const Expr& b) {
  if (cval(b, 0.0)) return a;
  if (cval(a, 0.0)) return ex::neg(b);
  if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant)
    return ex::constant(a->value - b->value);
  return ex::sub(a, b);
}
Expr smul(const Expr& a, const Expr& b) {
  if (cval(a, 0.0) || cval(b, 0.0)) return ex::constant(0.0);
  if (cval(a, 1.0)) return b;
  if (cval(b, 1.0)) return a;
  if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant)
    return ex::constant(a->value * b->value);
  return ex::mul(a, b);
}
Expr sdiv(const Expr& a, const Expr& b) {
  if (cval(a, 0.0)) return a;
  if (cval(b, 1.0)) return a;
  return ex::div(a, b);
}

// Metric values, inverse, and Christoffel values at a point.
struct PointGeometry {
  int n;
  std::vector<double> g, ginv, gamma;  // n^2, n^2, n^3
  double V = 0.0;
  std::vector<double> dV;  // n
};

PointGeometry point_geometry(const MetricField& m, const Expr* potential,
                             const std::vector<double>& q) {
  PointGeometry pg;
  const int n = m.dim();
  pg.n = n;
  std::vector<Jet> gj = m.eval_jets(q);
  pg.g.resize(n * n);
  Eigen::MatrixXd gm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      pg.g[i * n + j] = gj[i * n + j].value();
      gm(i, j) = pg.g[i * n + j];
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gm);
  if (!lu.isInvertible())
    throw NumericError("singular metric at evaluation point");
  Eigen::MatrixXd inv = lu.inverse();
  pg.ginv.resize(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pg.ginv[i * n + j] = inv(i, j);
  pg.gamma.assign(n * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += pg.ginv[i * n + l] *
               (gj[l * n + j].d1(k) + gj[l * n + k].d1(j) - gj[j * n + k].d1(l));
        s *= 0.5;
        pg.gamma[(i * n + j) * n + k] = s;
        pg.gamma[(i * n + k) * n + j] = s;
      }
  if (potential) {
    Jet vj = eval_jet(*potential, q, m.coords, m.params);
    pg.V = vj.value();
    pg.dV.resize(n);
    for (int i = 0; i < n; ++i) pg.dV[i] = vj.d1(i);
  }
  return pg;
}

std::vector<double> accel(const PointGeometry& pg,
                          const std::vector<double>& qdot, bool with_potential) {
  const int n = pg.n;
  std::vector<double> a(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        s -= pg.gamma[(i * n + j) * n + k] * qdot[j] * qdot[k];
    if (with_potential)
      for (int j = 0; j < n; ++j) s -= pg.ginv[i * n + j] * pg.dV[j];
    a[i] = s;
  }
  return a;
}

double kinetic(const PointGeometry& pg, const std::vector<double>& qdot) {
  double s = 0.0;
  for (int i = 0; i < pg.n; ++i)
    for (int j = 0; j < pg.n; ++j)
      s += pg.g[i * pg.n + j] * qdot[i] * qdot[j];
  return 0.5 * s;
}

// Generic RK4 trajectory driver over a second-order system given by a
// MetricField and optional potential.
Trajectory run_rk4(const MetricField& m, const Expr* potential,
                   const std::vector<std::pair<double, double>>* box,
                   const std::vector<Expr>& guards, const std::string& name,
                   const std::vector<double>& q0,
                   const std::vector<double>& qdot0, double T, double dt) {
  const int n = m.dim();
  const int nsteps = static_cast<int>(std::llround(T / dt));
  Trajectory traj;
  traj.system = name;
  traj.dt = dt;

  auto rhs = [&](const std::vector<double>& q, const std::vector<double>& qd) {
    PointGeometry pg = point_geometry(m, potential, q);
    return accel(pg, qd, potential != nullptr);
  };

  auto admissible = [&](const std::vector<double>& q) {
    if (box)
      for (int i = 0; i < n; ++i)
        if (q[i] < (*box)[i].first || q[i] > (*box)[i].second) return false;
    std::map<std::string, double> env = m.params;
    for (int i = 0; i < n; ++i) env[m.coords[i]] = q[i];
    for (const Expr& g : guards) {
      try {
        if (std::abs(eval_scalar(g, env)) < 1e-10) return false;
      } catch (const EvalError&) {
        return false;
      }
    }
    return true;
  };

  std::vector<double> q = q0, qd = qdot0;
  double prev_V = 0.0;
  for (int k = 0; k <= nsteps; ++k) {
    double tk = k * dt;
    PointGeometry pg = point_geometry(m, potential, q);
    traj.t.push_back(tk);
    traj.q.push_back(q);
    traj.qdot.push_back(qd);
    traj.H.push_back(kinetic(pg, qd) + pg.V);
    if (k == 0)
      traj.tau.push_back(0.0);
    else
      traj.tau.push_back(traj.tau.back() + 0.5 * (prev_V + pg.V) * dt);
    prev_V = pg.V;
    if (k == nsteps) break;

    std::vector<double> nq(n), nqd(n);
    try {
      std::vector<double> k1q = qd, k1v = accel(pg, qd, potential != nullptr);
      std::vector<double> q2(n), v2(n);
      for (int i = 0; i < n; ++i) {
        q2[i] = q[i] + 0.5 * dt * k1q[i];
        v2[i] = qd[i] + 0.5 * dt * k1v[i];
      }
      std::vector<double> k2q = v2, k2v = rhs(q2, v2);
      std::vector<double> q3(n), v3(n);
      for (int i = 0; i < n; ++i) {
        q3[i] = q[i] + 0.5 * dt * k2q[i];
        v3[i] = qd[i] + 0.5 * dt * k2v[i];
      }
      std::vector<double> k3q = v3, k3v = rhs(q3, v3);
      std::vector<double> q4(n), v4(n);
      for (int i = 0; i < n; ++i) {
        q4[i] = q[i] + dt * k3q[i];
        v4[i] = qd[i] + dt * k3v[i];
      }
      std::vector<double> k4q = v4, k4v = rhs(q4, v4);
      for (int i = 0; i < n; ++i) {
        nq[i] = q[i] + dt / 6.0 * (k1q[i] + 2 * k2q[i] + 2 * k3q[i] + k4q[i]);
        nqd[i] = qd[i] + dt / 6.0 * (k1v[i] + 2 * k2v[i] + 2 * k3v[i] + k4v[i]);
      }
    } catch (const std::runtime_error&) {
      traj.truncated = true;
      traj.truncated_at = tk;
      break;
    }
    if (!admissible(nq)) {
      traj.truncated = true;
      traj.truncated_at = tk;
      break;
    }
    q = std::move(nq);
    qd = std::move(nqd);
  }
  return traj;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string Trajectory::to_csv(const std::vector<std::string>& coords) const {
  std::string out = "t";
  for (const auto& c : coords) out += "," + c;
  for (const auto& c : coords) out += ",d" + c;
  out += ",H,tau";
  for (const auto& name : extra_names) out += "," + name;
  out += "\n";
  for (int k = 0; k < steps(); ++k) {
    out += fmt(t[k]);
    for (double x : q[k]) out += "," + fmt(x);
    for (double x : qdot[k]) out += "," + fmt(x);
    out += "," + fmt(H[k]) + "," + fmt(tau[k]);
    for (const auto& col : extra)
      out += "," + (k < static_cast<int>(col.size()) ? fmt(col[k]) : "");
    out += "\n";
  }
  if (truncated) out += "# truncated_at=" + fmt(truncated_at) + "\n";
  return out;
}

std::vector<double> eom_rhs(const SystemSpec& s, const std::vector<double>& q,
                            const std::vector<double>& qdot) {
  PointGeometry pg = point_geometry(s.g, &s.potential, q);
  return accel(pg, qdot, true);
}

std::vector<double> project_to_constraint(const SystemSpec& s,
                                          const std::vector<double>& q,
                                          const std::vector<double>& d) {
  PointGeometry pg = point_geometry(s.g, &s.potential, q);
  double gdd = 2.0 * kinetic(pg, d);
  if (gdd == 0.0)
    throw NumericError("direction is null with respect to the kinetic metric");
  double ratio = -2.0 * pg.V / gdd;
  if (ratio <= 0.0)
    throw NumericError("constraint surface empty along this direction");
  double lambda = std::sqrt(ratio);
  std::vector<double> qd(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) qd[i] = lambda * d[i];
  return qd;
}

Trajectory integrate(const SystemSpec& s, const std::vector<double>& q0,
                     const std::vector<double>& qdot0, double T, double dt) {
  if (dt <= 0.0) throw NumericError("step size must be positive");
  return run_rk4(s.g, &s.potential, &s.domain, s.guards, s.name, q0, qdot0, T, dt);
}

std::pair<Trajectory, double> null_lift_recover(const SystemSpec& s, double I0,
                                                const std::vector<double>& q0,
                                                const std::vector<double>& qdot0,
                                                double T, double dt) {
  if (I0 * I0 != 1.0)
    throw NumericError("lift recovery requires fiber momentum +1 or -1");
  const int n = s.dim();
  MetricField lift = eisenhart_lift(s);
  std::map<std::string, double> env = s.g.params;
  for (int i = 0; i < n; ++i) env[s.g.coords[i]] = q0[i];
  double V0 = eval_scalar(s.potential, env);

  // A null lift geodesic with conserved fiber momentum I0 traverses the
  // base trajectory with affine parameter sigma = sqrt(2) * t, so the
  // velocities start at qdot0/sqrt(2) and the grids align index by index
  // when the sigma step is sqrt(2) * dt.
  const double rt2 = std::sqrt(2.0);
  std::vector<double> Q0 = q0, Qd0(n + 1);
  Q0.push_back(0.0);
  for (int i = 0; i < n; ++i) Qd0[i] = qdot0[i] / rt2;
  Qd0[n] = I0 * V0;

  std::vector<Expr> guards = s.guards;
  guards.push_back(s.potential);
  Trajectory lifted = run_rk4(lift, nullptr, nullptr, guards, s.name + "-lift",
                              Q0, Qd0, rt2 * T, rt2 * dt);
  Trajectory base = integrate(s, q0, qdot0, T, dt);
  double resid = 0.0;
  int common = std::min(base.steps(), lifted.steps());
  for (int k = 0; k < common; ++k) {
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = lifted.q[k][i] - base.q[k][i];
      d2 += d * d;
    }
    resid = std::max(resid, std::sqrt(d2));
  }
  return {std::move(lifted), resid};
}

void apply_transform(const Transform& tr, const SystemSpec& s, Trajectory& traj) {
  const std::size_t ncols = tr.maps.size();
  std::vector<std::string> coords = s.g.coords;
  if (tr.target == "lift" && coords.size() + 1 == traj.q.front().size())
    coords.push_back("z");
  std::vector<std::vector<double>> cols(ncols);
  int limit = traj.steps();
  std::map<std::string, double> env;
  for (int k = 0; k < limit; ++k) {
    env = s.g.params;
    for (std::size_t i = 0; i < coords.size(); ++i)
      env[coords[i]] = traj.q[k][i];
    try {
      for (std::size_t c = 0; c < ncols; ++c)
        cols[c].push_back(eval_scalar(tr.maps[c], env));
    } catch (const EvalError&) {
      traj.truncated = true;
      traj.truncated_at = traj.t[k];
      limit = k;
      for (auto& col : cols) col.resize(k);
      break;
    }
  }
  if (limit < traj.steps()) {
    traj.t.resize(limit);
    traj.q.resize(limit);
    traj.qdot.resize(limit);
    traj.H.resize(limit);
    traj.tau.resize(limit);
    for (auto& col : traj.extra) col.resize(limit);
  }
  for (std::size_t c = 0; c < ncols; ++c) {
    traj.extra_names.push_back(tr.new_coords[c]);
    traj.extra.push_back(std::move(cols[c]));
  }
}

double straightness_residual(const std::vector<std::vector<double>>& points) {
  const int m = static_cast<int>(points.size());
  if (m < 3) throw NumericError("straightness needs at least 3 points");
  const int d = static_cast<int>(points.front().size());
  Eigen::MatrixXd X(m, d);
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < d; ++j) mean(j) += points[k][j] / m;
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < d; ++j) X(k, j) = points[k][j] - mean(j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  double s1 = svd.singularValues()(0);
  if (s1 <= 0.0) throw NumericError("degenerate point set");
  return svd.singularValues()(1) / s1;
}

double affine_check(const Trajectory& traj, const std::vector<int>& columns) {
  const int m = traj.steps();
  if (m < 3) throw NumericError("affine check needs at least 3 points");
  const bool up = traj.tau[m - 1] > traj.tau[0];
  for (int k = 1; k < m; ++k)
    if (up ? traj.tau[k] <= traj.tau[k - 1] : traj.tau[k] >= traj.tau[k - 1])
      throw NumericError("Jacobi time is not monotone along the trajectory");
  double worst = 0.0;
  for (int c : columns) {
    const std::vector<double>& u = traj.extra[c];
    double st = 0.0, su = 0.0, stt = 0.0, stu = 0.0;
    for (int k = 0; k < m; ++k) {
      st += traj.tau[k];
      su += u[k];
      stt += traj.tau[k] * traj.tau[k];
      stu += traj.tau[k] * u[k];
    }
    double det = m * stt - st * st;
    double a = (m * stu - st * su) / det;
    double b = (su - a * st) / m;
    double lo = u[0], hi = u[0], err = 0.0;
    for (int k = 0; k < m; ++k) {
      lo = std::min(lo, u[k]);
      hi = std::max(hi, u[k]);
      err = std::max(err, std::abs(a * traj.tau[k] + b - u[k]));
    }
    double range = hi - lo;
    worst = std::max(worst, err / (range > 0.0 ? range : 1.0));
  }
  return worst;
}

namespace {

Expr det_expr(const std::vector<Expr>& m, const std::vector<int>& rows,
              const std::vector<int>& cols, int n) {
  if (rows.size() == 1) return m[rows[0] * n + cols[0]];
  Expr acc = ex::constant(0.0);
  std::vector<int> subrows(rows.begin() + 1, rows.end());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    std::vector<int> subcols;
    for (std::size_t cc = 0; cc < cols.size(); ++cc)
      if (cc != c) subcols.push_back(cols[cc]);
    Expr term = smul(m[rows[0] * n + cols[c]], det_expr(m, subrows, subcols, n));
    acc = (c % 2 == 0) ? sadd(acc, term) : ssub(acc, term);
  }
  return acc;
}

}  // namespace

Expr hamiltonian_expr(const SystemSpec& s) {
  const int n = s.dim();
  if (n > 4)
    throw NumericError("symbolic inverse metric limited to dimension 4");
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  Expr det = det_expr(s.g.comp, all, all, n);
  Expr kin = ex::constant(0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // adjugate entry (i,j): signed minor with row j, column i removed
      std::vector<int> rows, cols;
      for (int r = 0; r < n; ++r)
        if (r != j) rows.push_back(r);
      for (int c = 0; c < n; ++c)
        if (c != i) cols.push_back(c);
      Expr minor = (n == 1) ? ex::constant(1.0) : det_expr(s.g.comp, rows, cols, n);
      if ((i + j) % 2 == 1) minor = ex::neg(minor);
      Expr term = smul(minor, smul(ex::symbol("p_" + s.g.coords[i]),
                                   ex::symbol("p_" + s.g.coords[j])));
      kin = sadd(kin, term);
    }
  kin = sdiv(kin, smul(ex::constant(2.0), det));
  return sadd(kin, s.potential);
}

ChargeSpec noether_charge_from_generator(const SystemSpec& s, const Generator& g) {
  Expr phi = ex::constant(0.0);
  if (!cval(g.xi, 0.0)) phi = smul(g.xi, hamiltonian_expr(s));
  for (int i = 0; i < s.dim(); ++i)
    phi = ssub(phi, smul(g.eta[i], ex::symbol("p_" + s.g.coords[i])));
  phi = sadd(phi, g.boundary);
  return ChargeSpec{g.name, phi, ""};
}

DriftStats charge_drift(const ChargeSpec& ch, const SystemSpec& s,
                        const Trajectory& traj) {
  const int n = s.dim();
  DriftStats st;
  std::map<std::string, double> env;
  for (int k = 0; k < traj.steps(); ++k) {
    std::vector<double> gv = s.g.eval_values(traj.q[k]);
    env = s.g.params;
    for (int i = 0; i < n; ++i) {
      env[s.g.coords[i]] = traj.q[k][i];
      double p = 0.0;
      for (int j = 0; j < n; ++j) p += gv[i * n + j] * traj.qdot[k][j];
      env["p_" + s.g.coords[i]] = p;
    }
    double phi = eval_scalar(ch.phi, env);
    if (k == 0) st.initial = phi;
    st.max_abs = std::max(st.max_abs, std::abs(phi - st.initial));
  }
  st.normalized = st.max_abs / std::max(std::abs(st.initial), 1.0);
  return st;
}

WeakNoetherResult weak_noether_check(const SystemSpec& s, const ChargeSpec& ch,
                                     int samples, std::uint64_t seed) {
  const int n = s.dim();
  Expr H = hamiltonian_expr(s);
  std::vector<std::string> phase_vars = s.g.coords;
  for (int i = 0; i < n; ++i) phase_vars.push_back("p_" + s.g.coords[i]);

  std::vector<std::vector<double>> pts = sample_points(s, samples, seed);
  rng_detail::SplitMix64 rng{seed ^ 0xA5A5A5A5DEADBEEFull};

  auto bracket = [&](const std::vector<double>& phase) {
    Jet pj = eval_jet(ch.phi, phase, phase_vars, s.g.params);
    Jet hj = eval_jet(H, phase, phase_vars, s.g.params);
    double b = 0.0;
    for (int i = 0; i < n; ++i)
      b += pj.d1(i) * hj.d1(n + i) - pj.d1(n + i) * hj.d1(i);
    return std::pair<double, double>{b, hj.value()};
  };

  WeakNoetherResult res;
  double sbh = 0.0, shh = 0.0, sb2 = 0.0;
  std::vector<std::pair<double, double>> off;
  for (const auto& q : pts) {
    std::vector<double> gv = s.g.eval_values(q);
    // on-shell: project a random direction onto the constraint surface
    std::vector<double> qd;
    for (int tries = 0; tries < 100 && qd.empty(); ++tries) {
      std::vector<double> d(n);
      for (int i = 0; i < n; ++i) d[i] = 2.0 * rng.uniform() - 1.0;
      try {
        qd = project_to_constraint(s, q, d);
      } catch (const NumericError&) {
      }
    }
    if (!qd.empty()) {
      std::vector<double> phase = q;
      for (int i = 0; i < n; ++i) {
        double p = 0.0;
        for (int j = 0; j < n; ++j) p += gv[i * n + j] * qd[j];
        phase.push_back(p);
      }
      auto [b, hv] = bracket(phase);
      res.onshell_max = std::max(res.onshell_max, std::abs(b));
    }
    // off-shell: generic momenta for the chi fit
    std::vector<double> phase = q;
    for (int i = 0; i < n; ++i) phase.push_back(2.0 * rng.uniform() - 1.0);
    auto [b, hv] = bracket(phase);
    sbh += b * hv;
    shh += hv * hv;
    sb2 += b * b;
    off.push_back({b, hv});
  }
  if (shh > 0.0) {
    res.chi = sbh / shh;
    double miss = 0.0;
    for (auto [b, hv] : off) {
      double e = b - res.chi * hv;
      miss += e * e;
    }
    res.fit_residual = std::sqrt(miss) / std::max(std::sqrt(sb2), 1e-12);
    res.chi_valid = res.fit_residual < 1e-6;
  }
  return res;
}

}  // namespace geolin

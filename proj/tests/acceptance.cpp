// End-to-end checks for the whole pipeline. Each numbered block prints a
// single pass/fail line; the exit status is nonzero when any block fails.
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fd_oracle.hpp"
#include "geolin/catalog.hpp"
#include "geolin/classify.hpp"
#include "geolin/curvature.hpp"
#include "geolin/dynamics.hpp"
#include "geolin/errors.hpp"
#include "geolin/system.hpp"

using namespace geolin;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool ok,
            const std::string& detail) {
  std::printf("criterion %2d %-4s %s (%s)\n", criterion, ok ? "PASS" : "FAIL",
              what.c_str(), detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

// 1. Ricci scalar of the conformal cosmological metric matches its
//    closed form over random parameter draws.
void criterion1() {
  SystemSpec base = catalog_get("szekeres-lambda-printed-jacobi").system;
  double spot[2] = {1.0, 2.0};
  double r_spot = CurvatureEval(base.g, spot).ricci_scalar().value();
  bool ok = std::abs(r_spot + 12.0) < 1e-8 * 12.0;
  double worst = 0.0;
  rng_detail::SplitMix64 rng{42};
  for (int trial = 0; trial < 20; ++trial) {
    SystemSpec s = base;
    double L = 2.0 * rng.uniform() - 1.0;
    double h = 0.5 + 1.5 * rng.uniform();
    s.g.params["L"] = L;
    s.g.params["h"] = h;
    auto pts = sample_points(s.g, s.domain, s.guards, 1, 1000 + trial);
    double u = pts[0][0], v = pts[0][1];
    double rn = CurvatureEval(s.g, pts[0]).ricci_scalar().value();
    double rf = -4.0 * (2.0 + L * u * u * u) * h /
                (u * (v * (L * u * u * u - 1.0) + h * u * u));
    worst = std::max(worst, std::abs(rn - rf) / std::abs(rf));
  }
  ok = ok && worst < 1e-8;
  report(1, "closed-form Ricci anchor", ok,
         "spot=" + fmt(r_spot) + " worst_rel=" + fmt(worst));
}

// 2. Cotton norm of the exponential-interaction lift separates the
//    conformally flat case (h=0) from the deformed one (h=1, V0=2).
void criterion2() {
  SystemSpec s = catalog_get("exponential-interaction").system;
  auto lift_residual = [](const SystemSpec& sys) {
    auto pts = sample_points(sys, 50, 7);
    for (auto& p : pts) p.push_back(0.0);
    return conformal_flatness_test(eisenhart_lift(sys), pts).residual_max;
  };
  double flat = lift_residual(s);
  SystemSpec bent = s;
  bent.g.params["h"] = 1.0;
  bent.g.params["V0"] = 2.0;
  double obstructed = lift_residual(bent);
  bool ok = flat < 1e-9 && obstructed > 1e-3;
  report(2, "exponential lift Cotton split", ok,
         "h=0: " + fmt(flat) + ", h=1: " + fmt(obstructed));
}

// 3. The printed oscillator Jacobi metric has constant curvature K equal
//    to the coupling for each sign, its lift is conformally flat, and
//    the reciprocal convention is visibly not constant-curvature.
void criterion3() {
  bool ok = true;
  std::string detail;
  for (double kappa : {1.0, 2.0, -1.0}) {
    SystemSpec s = catalog_get("oscillator-corrections-printed-jacobi").system;
    s.g.params["k"] = kappa;
    auto pts = sample_points(s.g, s.domain, s.guards, 12, 5);
    MaxSymReport ms = maximal_symmetry_test(s.g, pts);
    double kerr = 0.0;
    for (double K : ms.K) kerr = std::max(kerr, std::abs(K - kappa));
    ok = ok && ms.pass && kerr < 1e-9;

    MetricField lift;
    lift.coords = {"x", "y", "z"};
    lift.params = {{"k", kappa}};
    for (const char* c :
         {"(1 + k/4*(x^2 + y^2))^-2", "0", "0", "0",
          "(1 + k/4*(x^2 + y^2))^-2", "0", "0", "0", "1"})
      lift.comp.push_back(parse(c));
    auto lpts = pts;
    for (auto& p : lpts) p.push_back(0.0);
    ConformalReport cf = conformal_flatness_test(lift, lpts);
    ok = ok && cf.residual_max < 1e-9;

    MetricField twin =
        conformal_rescale(s.g, parse("(1 + k/4*(x^2 + y^2))^4"));
    MaxSymReport tw = maximal_symmetry_test(twin, pts);
    double spread = tw.K_std / (std::abs(tw.K_mean) + 1e-12);
    ok = ok && spread > 1e-2;
    if (kappa == 1.0)
      detail = "Kerr=" + fmt(kerr) + " cotton=" + fmt(cf.residual_max) +
               " twin_spread=" + fmt(spread);
  }
  report(3, "oscillator curvature anchors", ok, detail);
}

// 4. Classifier decisions on the six pinned systems, stable in the seed.
void criterion4() {
  struct Want {
    std::string name;
    double h;
    Decision d;
  };
  const std::vector<Want> wants = {
      {"szekeres", 0.0, Decision::Linearizable},
      {"szekeres", 1.0, Decision::NotLinearizable},
      {"harmonic-oscillator-control", 1.0, Decision::NotLinearizable},
      {"one-dim-exp", 0.0, Decision::Linearizable},
      {"corollary3-n3", 0.0, Decision::Linearizable},
      {"free-particle", 0.0, Decision::Linearizable},
  };
  bool ok = true;
  for (const Want& w : wants) {
    SystemSpec s = catalog_get(w.name).system;
    if (s.g.params.count("h")) s.g.params["h"] = w.h;
    for (std::uint64_t seed : {0ull, 1ull, 2ull})
      ok = ok && classify(s, 20, seed).decision == w.d;
  }
  report(4, "classifier decisions across seeds", ok, "6 systems x 3 seeds");
}

// 5. The charged-black-hole lift is conformally flat; Jacobi outcomes
//    for both conventions are informational.
void criterion5() {
  SystemSpec s = catalog_get("reissner-nordstrom").system;
  auto pts = sample_points(s, 50, 11);
  auto lpts = pts;
  for (auto& p : lpts) p.push_back(0.0);
  ConformalReport cf = conformal_flatness_test(eisenhart_lift(s), lpts);
  MaxSymReport canon =
      maximal_symmetry_test(jacobi_metric(s, JacobiConvention::Canonical), pts);
  MaxSymReport inv =
      maximal_symmetry_test(jacobi_metric(s, JacobiConvention::Inverse), pts);
  bool ok = cf.kind == "weyl" && cf.residual_max < 1e-9;
  report(5, "charged-black-hole lift Weyl", ok,
         "weyl=" + fmt(cf.residual_max) +
             " jacobi_res(canonical,inverse)=" + fmt(canon.residual_max) + "," +
             fmt(inv.residual_max));
}

// 6. Trajectories straighten under the catalog rectifiers and stay
//    visibly curved in the raw chart.
void criterion6() {
  bool ok = true;
  std::string detail;
  for (const char* name :
       {"szekeres", "szekeres-lambda", "exponential-interaction-real"}) {
    const CatalogEntry& e = catalog_get(name);
    auto qd = project_to_constraint(e.system, e.fixture.q0, e.fixture.direction);
    Trajectory traj =
        integrate(e.system, e.fixture.q0, qd, e.fixture.T, e.fixture.dt);
    ok = ok && !traj.truncated;
    Trajectory mapped = traj;
    apply_transform(e.system.transforms[0], e.system, mapped);
    std::vector<std::vector<double>> upts(mapped.steps());
    std::vector<int> cols;
    for (std::size_t c = 0; c < mapped.extra.size(); ++c)
      cols.push_back(static_cast<int>(c));
    for (int k = 0; k < mapped.steps(); ++k)
      for (int c : cols) upts[k].push_back(mapped.extra[c][k]);
    double st = straightness_residual(upts);
    double raw = straightness_residual(traj.q);
    ok = ok && st < 1e-6 && raw > 1e-2;
    for (const TransformClaim& tc : e.transform_claims)
      if (tc.affine) ok = ok && affine_check(mapped, cols) < 1e-5;
    detail += fmt(st) + "/" + fmt(raw) + " ";
  }
  report(6, "dynamic straightening", ok, "mapped/raw: " + detail);
}

// 7. Constraint preservation on every fixture run, charge drifts on the
//    cosmological system, and the weak-conservation factor.
void criterion7() {
  bool ok = true;
  double hworst = 0.0;
  for (const std::string& name : catalog_list()) {
    const CatalogEntry& e = catalog_get(name);
    if (!e.has_fixture) continue;
    auto qd = project_to_constraint(e.system, e.fixture.q0, e.fixture.direction);
    Trajectory traj =
        integrate(e.system, e.fixture.q0, qd, e.fixture.T, 1e-3);
    for (double H : traj.H) hworst = std::max(hworst, std::abs(H));
  }
  ok = ok && hworst < 1e-8;

  const CatalogEntry& sz = catalog_get("szekeres");
  auto qd = project_to_constraint(sz.system, sz.fixture.q0, sz.fixture.direction);
  Trajectory traj =
      integrate(sz.system, sz.fixture.q0, qd, sz.fixture.T, sz.fixture.dt);
  double dworst = 0.0;
  for (const Generator& g : sz.system.generators) {
    ChargeSpec ch = noether_charge_from_generator(sz.system, g);
    dworst = std::max(dworst, charge_drift(ch, sz.system, traj).normalized);
  }
  ok = ok && dworst < 1e-7;

  ChargeSpec scaling{"scaling", parse("v*p_v + 2*u*p_u"), ""};
  WeakNoetherResult w = weak_noether_check(sz.system, scaling, 30, 0);
  ok = ok && w.onshell_max < 1e-9 && w.chi_valid &&
       std::abs(std::abs(w.chi) - 3.0) < 1e-6;
  report(7, "constraint and charge conservation", ok,
         "maxH=" + fmt(hworst) + " drift=" + fmt(dworst) +
             " chi=" + fmt(w.chi));
}

// 8. Null geodesics of the lift reproduce the base motion for unit fiber
//    momentum only.
void criterion8() {
  const CatalogEntry& sz = catalog_get("szekeres");
  auto qd = project_to_constraint(sz.system, sz.fixture.q0, sz.fixture.direction);
  double worst = 0.0;
  bool ok = true;
  for (double I0 : {1.0, -1.0}) {
    auto [lifted, resid] = null_lift_recover(sz.system, I0, sz.fixture.q0, qd,
                                             sz.fixture.T, sz.fixture.dt);
    worst = std::max(worst, resid);
  }
  ok = worst < 1e-8;
  bool rejected = false;
  try {
    null_lift_recover(sz.system, 2.0, sz.fixture.q0, qd, 0.1, 1e-3);
  } catch (const NumericError&) {
    rejected = true;
  }
  ok = ok && rejected;
  report(8, "lift recovery", ok, "resid=" + fmt(worst));
}

// 9. Derivative engine against finite differences, and integrator order.
void criterion9() {
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
      {"v/u^2 - 0.3*u*v", {"u", "v"}},
      {"exp(x - y)*sin(x + y)", {"x", "y"}},
      {"ln(2 + x^2 + y^2)/sqrt(3 + x)", {"x", "y"}},
      {"-(1 + 0.25*(x^2 + y^2))^2", {"x", "y"}},
      {"cos(x*y*z) + x^3/(2 + z)", {"x", "y", "z"}},
  };
  rng_detail::SplitMix64 rng{99};
  int comparisons = 0;
  double worst = 0.0;
  for (int iter = 0; comparisons < 1000; ++iter) {
    const auto& [text, vars] = cases[iter % cases.size()];
    const int n = static_cast<int>(vars.size());
    std::vector<double> p(n);
    for (int i = 0; i < n; ++i) p[i] = 2.0 * rng.uniform() - 1.0;
    Expr e = parse(text);
    Jet j = eval_jet(e, p, vars, {});
    auto scalar = [&](const std::vector<double>& v) {
      std::map<std::string, double> env;
      for (int i = 0; i < n; ++i) env[vars[i]] = v[i];
      return eval_scalar(e, env);
    };
    auto rel = [&](double got, double want) {
      return std::abs(got - want) / (1.0 + std::abs(want));
    };
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, rel(j.d1(i), fd::derivative(scalar, p, {i})));
      ++comparisons;
    }
    for (int i = 0; i < n; ++i)
      for (int k = i; k < n; ++k) {
        worst = std::max(worst, rel(j.d2(i, k), fd::derivative(scalar, p, {i, k})));
        ++comparisons;
      }
  }
  bool ok = worst < 1e-5;

  const CatalogEntry& sz = catalog_get("szekeres");
  auto qd = project_to_constraint(sz.system, sz.fixture.q0, sz.fixture.direction);
  auto endpoint = [&](double dt) {
    return integrate(sz.system, sz.fixture.q0, qd, 0.4, dt).q.back();
  };
  auto e1 = endpoint(0.025), e2 = endpoint(0.0125), e4 = endpoint(0.00625);
  double d12 = std::hypot(e1[0] - e2[0], e1[1] - e2[1]);
  double d24 = std::hypot(e2[0] - e4[0], e2[1] - e4[1]);
  double order = std::log2(d12 / d24);
  ok = ok && order > 3.8 && order < 4.2;
  report(9, "derivative engine and integrator order", ok,
         "fd_worst=" + fmt(worst) + " order=" + fmt(order));
}

// 10. The verdict does not depend on which conformal representative of
//     the lift is tested.
void criterion10() {
  auto band = [](double r) { return r < 1e-8 ? 0 : (r > 1e-4 ? 1 : 2); };
  bool ok = true;
  int checked = 0;
  for (const std::string& name : catalog_list()) {
    const CatalogEntry& e = catalog_get(name);
    if (e.metric_only || e.system.dim() < 2) continue;
    auto pts = sample_points(e.system, 15, 3);
    for (auto& p : pts) p.push_back(0.0);
    // canonical family: the plain lift and arbitrary rescales of the
    // canonical Jacobi lift are one conformal class
    double plain =
        conformal_flatness_test(eisenhart_lift(e.system), pts).residual_max;
    MetricField alt = conformal_rescale(
        jacobi_eisenhart_lift(e.system, JacobiConvention::Canonical),
        parse("1/(" + print(e.system.potential) + ")"));
    double other = conformal_flatness_test(alt, pts).residual_max;
    MetricField scaled = conformal_rescale(
        jacobi_eisenhart_lift(e.system, JacobiConvention::Canonical),
        parse("3"));
    double third = conformal_flatness_test(scaled, pts).residual_max;
    ok = ok && band(plain) == band(other) && band(plain) == band(third);
    // inverse family: rescales of the g/V lift agree among themselves
    double ia = conformal_flatness_test(
                    conformal_rescale(
                        jacobi_eisenhart_lift(e.system, JacobiConvention::Inverse),
                        e.system.potential),
                    pts)
                    .residual_max;
    double ib = conformal_flatness_test(
                    conformal_rescale(
                        jacobi_eisenhart_lift(e.system, JacobiConvention::Inverse),
                        parse("5")),
                    pts)
                    .residual_max;
    ok = ok && band(ia) == band(ib);
    ++checked;
  }
  report(10, "convention-free verdicts", ok,
         std::to_string(checked) + " systems, 3 representatives each");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}

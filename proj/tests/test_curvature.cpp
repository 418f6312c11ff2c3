#include <cmath>
#include <vector>

#include "doctest.h"
#include "geolin/curvature.hpp"
#include "geolin/errors.hpp"
#include "geolin/expr.hpp"

using namespace geolin;

namespace {

MetricField make_metric(std::vector<std::string> coords,
                        std::vector<std::string> comps,
                        std::map<std::string, double> params = {}) {
  MetricField m;
  m.coords = std::move(coords);
  for (const auto& s : comps) m.comp.push_back(parse(s));
  m.params = std::move(params);
  return m;
}

}  // namespace

TEST_CASE("polar chart of the flat plane") {
  MetricField m = make_metric({"r", "t"}, {"1", "0", "0", "r^2"});
  double p[2] = {1.3, 0.7};
  CurvatureEval ev(m, p);
  CHECK(ev.gamma(0, 1, 1).value() == doctest::Approx(-1.3).epsilon(1e-14));
  CHECK(ev.gamma(1, 0, 1).value() == doctest::Approx(1.0 / 1.3).epsilon(1e-14));
  CHECK(ev.gamma(0, 0, 0).value() == doctest::Approx(0.0));
  // flatness must survive the curvilinear chart
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          CHECK(std::abs(ev.riemann_low(i, j, k, l)) < 1e-12);
  CHECK(std::abs(ev.ricci_scalar().value()) < 1e-12);
  auto [K, res] = ev.constant_curvature();
  CHECK(std::abs(K) < 1e-12);
  CHECK(res < 1e-9);
}

TEST_CASE("flat three-space in cylindrical coordinates has zero Cotton") {
  MetricField m = make_metric({"r", "t", "w"},
                              {"1", "0", "0", "0", "r^2", "0", "0", "0", "1"});
  double p[3] = {0.9, 0.4, 0.0};
  CurvatureEval ev(m, p);
  CHECK(ev.cotton_norm() < 1e-9);
  auto [K, res] = ev.constant_curvature();
  CHECK(res < 1e-9);
  CHECK(std::abs(K) < 1e-12);
}

TEST_CASE("unit two-sphere") {
  MetricField m = make_metric({"t", "p"}, {"1", "0", "0", "sin(t)^2"});
  double pt[2] = {1.1, 0.3};
  CurvatureEval ev(m, pt);
  CHECK(ev.ricci_scalar().value() == doctest::Approx(2.0).epsilon(1e-12));
  auto [K, res] = ev.constant_curvature();
  CHECK(K == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res < 1e-10);
}

TEST_CASE("lowered Riemann symmetries") {
  MetricField m = make_metric(
      {"u", "v"}, {"0", "1/(2*(v/u^2 - u*v - 1))", "1/(2*(v/u^2 - u*v - 1))", "0"});
  double p[2] = {0.6, 1.4};
  CurvatureEval ev(m, p);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          // last-pair antisymmetry is forced by the construction
          CHECK(ev.riemann_low(i, j, k, l) == -ev.riemann_low(i, j, l, k));
          CHECK(ev.riemann_low(i, j, k, l) ==
                doctest::Approx(-ev.riemann_low(j, i, k, l)).epsilon(1e-9));
        }
  CHECK(ev.bianchi_residual() < 1e-9);
}

TEST_CASE("Ricci scalar anchor for the conformal Szekeres metric") {
  MetricField m = make_metric(
      {"u", "v"},
      {"0", "1/(2*(v/u^2 - L*u*v - h))", "1/(2*(v/u^2 - L*u*v - h))", "0"},
      {{"L", 1.0}, {"h", 1.0}});
  double p[2] = {1.0, 2.0};
  CurvatureEval ev(m, p);
  CHECK(ev.ricci_scalar().value() == doctest::Approx(-12.0).epsilon(1e-10));
}

TEST_CASE("Liouville residual detects constant curvature") {
  // exp(2U) delta with U = -ln(1 + k r^2/4) has Gaussian curvature k;
  // the residual form U_xx + U_yy + 2 kappa e^{2U} vanishes at kappa = k/2
  Expr U = parse("-ln(1 + k/4*(x^2 + y^2))");
  CHECK(std::abs(liouville_residual(U, 1.0, 0.3, -0.4, {"x", "y"},
                                    {{"k", 2.0}})) < 1e-12);
  CHECK(std::abs(liouville_residual(U, 2.0, 0.3, -0.4, {"x", "y"},
                                    {{"k", 2.0}})) > 1e-2);
  // U = x is no solution for any kappa: residual 2 kappa e^2 at x = 1
  CHECK(liouville_residual(parse("x"), 1.0, 1.0, 0.0, {"x", "y"}, {}) ==
        doctest::Approx(2.0 * std::exp(2.0)).epsilon(1e-12));
}

TEST_CASE("Weyl separates conformally flat from generic 4D metrics") {
  MetricField schw = make_metric(
      {"t", "r", "p", "w"},
      {"-(1 - 1/r)", "0", "0", "0",
       "0", "1/(1 - 1/r)", "0", "0",
       "0", "0", "r^2", "0",
       "0", "0", "0", "r^2*sin(p)^2"});
  double p[4] = {0.0, 3.0, 1.2, 0.4};
  CurvatureEval ev(schw, p);
  CHECK(ev.weyl_norm() > 1e-3);

  MetricField conf = make_metric(
      {"x", "y", "z", "w"},
      {"exp(x + y)", "0", "0", "0",
       "0", "exp(x + y)", "0", "0",
       "0", "0", "exp(x + y)", "0",
       "0", "0", "0", "exp(x + y)"});
  double q[4] = {0.2, -0.3, 0.5, 0.1};
  CurvatureEval ev2(conf, q);
  CHECK(ev2.weyl_norm() < 1e-10);
}

TEST_CASE("dimension guards") {
  MetricField m2 = make_metric({"x", "y"}, {"1", "0", "0", "1"});
  double p[2] = {0.0, 0.0};
  CurvatureEval ev(m2, p);
  CHECK_THROWS_AS(ev.cotton(), NumericError);
  CHECK_THROWS_AS(ev.weyl(), NumericError);
}

TEST_CASE("singular metric is rejected") {
  MetricField m = make_metric({"x", "y"}, {"x", "0", "0", "x"});
  double p[2] = {0.0, 1.0};
  CHECK_THROWS_AS(CurvatureEval(m, p), NumericError);
}

TEST_CASE("curvature report serializes with fixed key order") {
  MetricField m = make_metric({"t", "p"}, {"1", "0", "0", "sin(t)^2"});
  double pt[2] = {1.1, 0.3};
  CurvatureReport rep = curvature_report(m, pt, false);
  std::string j = rep.to_json(false);
  auto kp = j.find("\"point\"");
  auto kk = j.find("\"K\"");
  auto kr = j.find("\"residuals\"");
  auto ks = j.find("\"R\"");
  CHECK(kp < kk);
  CHECK(kk < kr);
  CHECK(kr < ks);
  CHECK(j.find("tensors") == std::string::npos);
  std::string jv = curvature_report(m, pt, true).to_json(true);
  CHECK(jv.find("tensors") != std::string::npos);
}

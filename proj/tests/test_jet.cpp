#include <cmath>
#include <vector>

#include "doctest.h"
#include "fd_oracle.hpp"
#include "geolin/errors.hpp"
#include "geolin/jet.hpp"

using geolin::Jet;

namespace {

Jet x_at(int n, int i, double v) { return Jet::variable(n, i, v); }

}  // namespace

TEST_CASE("constant and variable seeds") {
  Jet c = Jet::constant(3, 2.5);
  CHECK(c.value() == 2.5);
  CHECK(c.d1(0) == 0.0);
  Jet v = x_at(3, 1, 4.0);
  CHECK(v.value() == 4.0);
  CHECK(v.d1(1) == 1.0);
  CHECK(v.d1(0) == 0.0);
  CHECK(v.d2(1, 1) == 0.0);
}

TEST_CASE("polynomial derivatives are exact") {
  // f = x^2 y + 3 x y^3
  double xv = 1.7, yv = -0.6;
  Jet x = x_at(2, 0, xv), y = x_at(2, 1, yv);
  Jet f = x * x * y + 3.0 * (x * (y * y * y));
  CHECK(f.value() == doctest::Approx(xv * xv * yv + 3 * xv * yv * yv * yv).epsilon(1e-15));
  CHECK(f.d1(0) == doctest::Approx(2 * xv * yv + 3 * yv * yv * yv).epsilon(1e-15));
  CHECK(f.d1(1) == doctest::Approx(xv * xv + 9 * xv * yv * yv).epsilon(1e-15));
  CHECK(f.d2(0, 0) == doctest::Approx(2 * yv).epsilon(1e-15));
  CHECK(f.d2(0, 1) == doctest::Approx(2 * xv + 9 * yv * yv).epsilon(1e-15));
  CHECK(f.d2(1, 1) == doctest::Approx(18 * xv * yv).epsilon(1e-15));
  CHECK(f.d3(0, 0, 1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f.d3(1, 1, 1) == doctest::Approx(18 * xv).epsilon(1e-15));
  CHECK(f.d3(0, 1, 1) == doctest::Approx(18 * yv).epsilon(1e-15));
  CHECK(f.d3(0, 0, 0) == 0.0);
}

TEST_CASE("mixed partials are symmetric by construction") {
  Jet x = x_at(3, 0, 0.3), y = x_at(3, 1, 1.2), z = x_at(3, 2, -0.4);
  Jet f = jet_sin(x * y) * jet_exp(z) + x / (2.0 + y);
  CHECK(f.d2(0, 1) == f.d2(1, 0));
  CHECK(f.d3(0, 1, 2) == f.d3(2, 1, 0));
  CHECK(f.d3(1, 0, 2) == f.d3(2, 0, 1));
}

TEST_CASE("elementary functions match finite differences") {
  std::vector<double> p{0.7, 1.3};
  auto scalar = [](const std::vector<double>& v) {
    return std::exp(std::sin(v[0] * v[1])) + std::log(2.0 + v[0]) / std::sqrt(v[1]);
  };
  Jet x = x_at(2, 0, p[0]), y = x_at(2, 1, p[1]);
  Jet f = jet_exp(jet_sin(x * y)) + jet_log(2.0 + x) / jet_sqrt(y);
  CHECK(f.value() == doctest::Approx(scalar(p)).epsilon(1e-14));
  for (int i = 0; i < 2; ++i)
    CHECK(f.d1(i) == doctest::Approx(fd::derivative(scalar, p, {i})).epsilon(1e-8));
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j)
      CHECK(f.d2(i, j) ==
            doctest::Approx(fd::derivative(scalar, p, {i, j})).epsilon(1e-6));
  CHECK(f.d3(0, 0, 1) ==
        doctest::Approx(fd::derivative(scalar, p, {0, 0, 1})).epsilon(1e-4));
  CHECK(f.d3(1, 1, 1) ==
        doctest::Approx(fd::derivative(scalar, p, {1, 1, 1})).epsilon(1e-4));
}

TEST_CASE("derivative() shifts the jet one order down") {
  Jet x = x_at(2, 0, 0.4), y = x_at(2, 1, 0.9);
  Jet f = jet_cos(x) * y * y + x * x * x;
  Jet fx = f.derivative(0);
  CHECK(fx.value() == doctest::Approx(f.d1(0)).epsilon(1e-15));
  CHECK(fx.d1(0) == doctest::Approx(f.d2(0, 0)).epsilon(1e-15));
  CHECK(fx.d1(1) == doctest::Approx(f.d2(0, 1)).epsilon(1e-15));
  CHECK(fx.d2(0, 1) == doctest::Approx(f.d3(0, 0, 1)).epsilon(1e-15));
  CHECK(fx.d2(1, 1) == doctest::Approx(f.d3(0, 1, 1)).epsilon(1e-15));
}

TEST_CASE("division agrees with reciprocal multiplication") {
  Jet x = x_at(2, 0, 1.9), y = x_at(2, 1, -0.8);
  Jet a = (1.0 + x * y) / (2.0 - y);
  Jet b = (1.0 + x * y) * geolin::jet_recip(2.0 - y);
  for (int s = 0; s < a.size(); ++s)
    CHECK(a.coeff(s) == doctest::Approx(b.coeff(s)).epsilon(1e-14));
}

TEST_CASE("integer powers work on negative bases") {
  Jet x = x_at(1, 0, -1.5);
  Jet f = geolin::jet_pow(x, 3.0);
  CHECK(f.value() == doctest::Approx(-3.375).epsilon(1e-15));
  CHECK(f.d1(0) == doctest::Approx(3 * 1.5 * 1.5).epsilon(1e-15));
  Jet g = geolin::jet_pow(x, -2.0);
  CHECK(g.value() == doctest::Approx(1.0 / 2.25).epsilon(1e-14));
}

TEST_CASE("domain errors are strict") {
  Jet z = Jet::constant(1, 0.0);
  CHECK_THROWS_AS(geolin::jet_recip(z), geolin::NumericError);
  CHECK_THROWS_AS(geolin::jet_log(Jet::constant(1, -1.0)), geolin::NumericError);
  CHECK_THROWS_AS(geolin::jet_sqrt(Jet::constant(1, -4.0)), geolin::NumericError);
  CHECK_THROWS_AS(geolin::jet_pow(Jet::constant(1, -2.0), 0.5),
                  geolin::NumericError);
}

TEST_CASE("sixteen variables are supported") {
  const int n = 16;
  Jet acc = Jet::constant(n, 0.0);
  for (int i = 0; i < n; ++i) acc += x_at(n, i, 0.1 * (i + 1));
  Jet f = acc * acc * acc;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += 0.1 * (i + 1);
  CHECK(f.value() == doctest::Approx(s * s * s).epsilon(1e-13));
  CHECK(f.d3(0, 7, 15) == doctest::Approx(6.0).epsilon(1e-13));
  CHECK_THROWS_AS(Jet(17), geolin::NumericError);
}

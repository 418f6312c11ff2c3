#include <cmath>
#include <string>

#include "doctest.h"
#include "geolin/errors.hpp"
#include "geolin/system.hpp"

using namespace geolin;

namespace {

const char* kSzekeres = R"({
  "name": "szekeres",
  "coordinates": ["u", "v"],
  "parameters": {"h": 0},
  "metric": [["0", "1"], ["1", "0"]],
  "potential": "v/u^2 - h",
  "domain": {"u": [0.5, 2], "v": [0.5, 2]},
  "transforms": [
    {"name": "rectify", "target": "jacobi-canonical",
     "maps": {"U": "-1/u", "V": "v^2/2"}}
  ],
  "generators": [
    {"name": "X1", "xi": "0", "eta": {"u": "0", "v": "1/v"}, "boundary": "0"}
  ]
})";

double comp_at(const MetricField& m, int i, int j, std::vector<double> p) {
  return m.eval_values(p)[i * m.dim() + j];
}

}  // namespace

TEST_CASE("load parses a full document") {
  SystemSpec s = load_system(kSzekeres);
  CHECK(s.name == "szekeres");
  CHECK(s.dim() == 2);
  CHECK(s.g.params.at("h") == 0.0);
  CHECK(s.transforms.size() == 1);
  CHECK(s.generators.size() == 1);
  CHECK(print(s.potential) == "v/u^2 - h");
}

TEST_CASE("load rejects malformed documents with paths") {
  auto expect_path = [](const std::string& doc, const std::string& path_part) {
    try {
      load_system(doc);
      FAIL("expected SpecError");
    } catch (const SpecError& e) {
      CHECK(e.path.find(path_part) != std::string::npos);
    }
  };
  expect_path(R"({"name":"x","coordinates":["u","v"],
    "metric":[["0","1"],["u","0"]],
    "potential":"1","domain":{"u":[0,1],"v":[0,1]}})", "/metric");
  expect_path(R"({"name":"x","coordinates":["u","v"],
    "metric":[["0","1"],["1","0"]],
    "potential":"v/u^2 - m","domain":{"u":[0,1],"v":[0,1]}})", "/potential");
  expect_path(R"({"name":"x","coordinates":["u","v"],
    "metric":[["0","1"],["1","0"]],
    "potential":"1","domain":{"u":[0,1]}})", "/domain");
  expect_path(R"({"name":"x","coordinates":["u","v"],
    "metric":[["0","1"],["1","0"]],
    "potential":"1","domain":{"u":[1,1],"v":[0,1]}})", "/domain/u");
  CHECK_THROWS_AS(load_system("not json"), SpecError);
  try {
    load_system(R"({"name":"x","coordinates":["u","v"],
      "metric":[["0","1"],["u","0"]],
      "potential":"1","domain":{"u":[0,1],"v":[0,1]}})");
  } catch (const SpecError& e) {
    CHECK(std::string(e.what()).find("not symmetric") != std::string::npos);
  }
}

TEST_CASE("serialize then load is the identity") {
  SystemSpec s = load_system(kSzekeres);
  std::string round = serialize_system(s);
  SystemSpec s2 = load_system(round);
  CHECK(serialize_system(s2) == round);
  CHECK(equal(s.potential, s2.potential));
  CHECK(equal(s.g.at(0, 1), s2.g.at(0, 1)));
  CHECK(s.domain == s2.domain);
}

TEST_CASE("jacobi metric conventions") {
  SystemSpec s = load_system(kSzekeres);
  MetricField canon = jacobi_metric(s, JacobiConvention::Canonical);
  CHECK(comp_at(canon, 0, 1, {1.0, 1.5}) == doctest::Approx(1.5).epsilon(1e-14));
  MetricField inv = jacobi_metric(s, JacobiConvention::Inverse);
  CHECK(comp_at(inv, 0, 1, {1.0, 1.5}) ==
        doctest::Approx(1.0 / 1.5).epsilon(1e-14));
  CHECK(comp_at(canon, 0, 0, {1.0, 1.5}) == 0.0);
}

TEST_CASE("lifts") {
  SystemSpec s = load_system(kSzekeres);
  MetricField lift = eisenhart_lift(s);
  CHECK(lift.dim() == 3);
  CHECK(lift.coords.back() == "z");
  CHECK(comp_at(lift, 2, 2, {2.0, 1.0, 0.0}) ==
        doctest::Approx(4.0).epsilon(1e-14));  // u^2 / v
  MetricField jl = jacobi_eisenhart_lift(s, JacobiConvention::Canonical);
  CHECK(comp_at(jl, 2, 2, {2.0, 1.0, 0.0}) == 1.0);

  // (1/V) * (V g + dz^2) must equal g + (1/V) dz^2 componentwise
  MetricField rescaled = conformal_rescale(jl, parse("1/(v/u^2 - h)"));
  rng_detail::SplitMix64 rng{7};
  for (int k = 0; k < 20; ++k) {
    std::vector<double> p{0.5 + 1.5 * rng.uniform(), 0.5 + 1.5 * rng.uniform(),
                          rng.uniform()};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double a = comp_at(rescaled, i, j, p), b = comp_at(lift, i, j, p);
        CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)));
      }
  }
  CHECK_THROWS_AS(eisenhart_lift(s, "u"), SpecError);
}

TEST_CASE("conformal rescale by one is the identity") {
  SystemSpec s = load_system(kSzekeres);
  MetricField m = conformal_rescale(s.g, parse("1"));
  CHECK(comp_at(m, 0, 1, {1.2, 0.9}) == comp_at(s.g, 0, 1, {1.2, 0.9}));
}

TEST_CASE("flatten_1d quadrature matches closed forms") {
  auto one_dim = [](const std::string& V, double lo, double hi) {
    std::string doc = std::string(R"({"name":"d1","coordinates":["q"],
      "metric":[["1"]],"potential":")") + V +
        R"(","domain":{"q":[)" + std::to_string(lo) + "," +
        std::to_string(hi) + "]}}";
    return load_system(doc);
  };
  Flatten1D f1 = flatten_1d(one_dim("1", 0.0, 2.0));
  CHECK(f1(1.3) == doctest::Approx(1.3).epsilon(1e-12));

  Flatten1D f2 = flatten_1d(one_dim("exp(2*q)", 0.0, 1.0));
  CHECK(f2(0.8) == doctest::Approx(1.0 - std::exp(-0.8)).epsilon(1e-9));

  Flatten1D f3 = flatten_1d(one_dim("q^2", 1.0, 2.0));
  CHECK(f3(1.7) == doctest::Approx(std::log(1.7)).epsilon(1e-9));

  // strict monotonicity
  double prev = f3(1.0);
  for (int k = 1; k <= 100; ++k) {
    double y = f3(1.0 + k * 0.01);
    CHECK(y > prev);
    prev = y;
  }
  CHECK_THROWS_AS(flatten_1d(one_dim("q", -1.0, 1.0)), NumericError);
}

TEST_CASE("sampling is deterministic with a prefix property") {
  SystemSpec s = load_system(kSzekeres);
  auto a = sample_points(s, 5, 0);
  auto b = sample_points(s, 5, 0);
  CHECK(a == b);
  auto c = sample_points(s, 9, 0);
  for (int i = 0; i < 5; ++i) CHECK(a[i] == c[i]);
  auto d = sample_points(s, 5, 1);
  CHECK(a != d);
  for (const auto& p : a) {
    CHECK(p[0] >= 0.5);
    CHECK(p[0] <= 2.0);
  }
}

TEST_CASE("sampling exhausts when guards exclude the whole box") {
  SystemSpec s = load_system(kSzekeres);
  s.guards.push_back(parse("0"));  // always inside the rejection band
  try {
    sample_points(s, 2, 0);
    FAIL("expected exhaustion");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("exhausted") != std::string::npos);
  }
}

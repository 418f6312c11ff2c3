#include <set>
#include <string>

#include "doctest.h"
#include "geolin/catalog.hpp"
#include "geolin/errors.hpp"
#include "geolin/system.hpp"
#include "json.hpp"

using namespace geolin;

TEST_CASE("catalog lists twelve unique sorted entries") {
  auto names = catalog_list();
  CHECK(names.size() == 12);
  std::set<std::string> uniq(names.begin(), names.end());
  CHECK(uniq.size() == names.size());
  for (size_t i = 1; i < names.size(); ++i) CHECK(names[i - 1] < names[i]);
  for (const char* want :
       {"corollary3-n3", "exponential-interaction", "free-particle",
        "reissner-nordstrom", "szekeres", "szekeres-lambda",
        "szekeres-lambda-printed-jacobi", "one-dim-exp",
        "oscillator-corrections", "harmonic-oscillator-control"})
    CHECK(uniq.count(want) == 1);
}

TEST_CASE("entry anchors") {
  const CatalogEntry& rn = catalog_get("reissner-nordstrom");
  CHECK(rn.system.dim() == 3);
  // g_zeta,zeta = 4 b^2 / a
  std::vector<double> rn_pt{1.0, 2.0, 0.0};
  CHECK(rn.system.g.eval_values(rn_pt)[8] ==
        doctest::Approx(16.0).epsilon(1e-14));
  CHECK(rn.system.generators.size() == 6);
  CHECK(rn.record_charges);

  const CatalogEntry& sz = catalog_get("szekeres");
  CHECK(sz.system.generators.size() == 3);
  CHECK(sz.check_charges);
  CHECK(sz.expected_decision == "LINEARIZABLE");

  const CatalogEntry& fp = catalog_get("free-particle");
  CHECK(fp.expected_decision == "LINEARIZABLE");
  const CatalogEntry& ho = catalog_get("harmonic-oscillator-control");
  CHECK(ho.expected_decision == "NOT_LINEARIZABLE");

  CHECK(catalog_get("szekeres-lambda-printed-jacobi").metric_only);
  CHECK_THROWS_AS(catalog_get("nope"), NumericError);
}

TEST_CASE("full suite passes and serializes") {
  SuiteReport rep = run_all(0);
  CHECK(rep.all_pass());
  CHECK(rep.claims.size() > 20);
  auto parsed = nlohmann::json::parse(rep.to_json());
  REQUIRE(parsed.is_array());
  for (const auto& item : parsed) {
    CHECK(item.contains("entry"));
    CHECK(item.contains("claim"));
    CHECK(item.contains("provenance"));
    CHECK(item.contains("expected"));
    CHECK(item.contains("measured"));
    CHECK(item.contains("tolerance"));
    CHECK(item.contains("pass"));
    std::string prov = item["provenance"];
    CHECK((prov == "reference" || prov == "derived" || prov == "baseline"));
  }
}

TEST_CASE("suite verdicts are seed stable") {
  SuiteReport a = run_all(1);
  CHECK(a.all_pass());
}

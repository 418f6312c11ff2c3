#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "geolin/system.hpp"

namespace geolin {

struct DynamicsFixture {
  std::vector<double> q0;
  std::vector<double> direction;  // projected onto the constraint surface
  double T = 0.5;
  double dt = 1e-3;
};

/// How a transform annotation is exercised by the suite.
///   straightness: integrate, map, and require the mapped path to be a
///     line (plus the affine-in-tau check when `affine` is set);
///   recorded: kept for reference, never asserted.
struct TransformClaim {
  std::string transform_name;
  std::string mode;  // "straightness" | "recorded"
  bool affine = false;
};

struct CatalogEntry {
  std::string name;
  std::string notes;
  bool metric_only = false;
  SystemSpec system;  // for metric-only entries, only g/domain/guards apply
  std::string expected_decision;  // empty when no classification claim
  bool has_fixture = false;
  DynamicsFixture fixture;
  std::vector<TransformClaim> transform_claims;
  bool check_charges = false;    // assert small drift for every generator
  bool record_charges = false;   // evaluate drift, report without asserting
  bool check_lift_recovery = false;
};

/// Names of the built-in fixtures, sorted.
std::vector<std::string> catalog_list();

/// Throws NumericError on unknown name.
const CatalogEntry& catalog_get(const std::string& name);

struct ClaimResult {
  std::string entry;
  std::string claim;
  std::string provenance;  // "reference" | "derived" | "baseline"
  std::string expected;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::vector<ClaimResult> claims;
  bool all_pass() const;
  std::string to_json() const;
};

/// Execute every entry's claims: classification decisions, scalar
/// anchors, constraint drift, straightening, charges, lift recovery.
SuiteReport run_all(std::uint64_t seed);

}  // namespace geolin

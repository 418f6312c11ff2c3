#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geolin/system.hpp"

namespace geolin {

enum class Decision { Linearizable, NotLinearizable, Indeterminate };

std::string to_string(Decision d);

/// Per-point constant-curvature statistics of one metric.
struct MaxSymReport {
  std::vector<double> K;
  std::vector<double> residual;
  double K_mean = 0.0;
  double K_std = 0.0;
  double residual_max = 0.0;
  bool pass = false;
};

/// Per-point conformal-flatness diagnostic: Cotton norm in dimension 3,
/// Weyl norm in dimension >= 4, vacuous pass at dimension <= 2.
struct ConformalReport {
  std::string kind;  // "cotton" | "weyl" | "dim<=2"
  std::vector<double> residual;
  double residual_max = 0.0;
};

struct Verdict {
  std::string system;
  int n = 0;
  Decision decision = Decision::Indeterminate;
  MaxSymReport max_sym;                      // canonical Jacobi convention
  MaxSymReport max_sym_inverse;              // g/V convention
  /// Conformal flatness of the two lift families. The canonical family
  /// is the plain lift g + (1/V) dz^2 (conformal to V g + dz^2); the
  /// inverse family is g + V dz^2 (conformal to g/V + dz^2). The
  /// literature geometrizes different examples with different
  /// conventions, so a system counts as linearizable when either family
  /// is conformally flat.
  ConformalReport conformal;                 // canonical family
  ConformalReport conformal_inverse;         // inverse family
  std::uint64_t seed = 0;
  int points = 0;
  double pass_threshold = 1e-8;
  double fail_threshold = 1e-4;
  /// Implied first-integral count n(n+1)/2 when linearizable, else 0.
  int noether_count() const;
  std::string to_json() const;  // fixed key order
};

/// Constant-curvature test R_ijkl = K(g_ik g_jl - g_il g_jk) over the
/// given points. Pass: residual_max below 1e-8 and K either consistent
/// across points (relative spread < 1e-6) or identically zero (< 1e-10).
MaxSymReport maximal_symmetry_test(const MetricField& m,
                                   const std::vector<std::vector<double>>& pts);

ConformalReport conformal_flatness_test(const MetricField& m,
                                        const std::vector<std::vector<double>>& pts);

/// Decide linearizability by sampling. Dimension 1 passes outright; for
/// n >= 2 the decision comes from conformal flatness of the potential
/// lift (convention-free), with Jacobi constant-curvature statistics for
/// both conventions attached as evidence.
Verdict classify(const SystemSpec& s, int samples, std::uint64_t seed);

/// The family g = Euclidean delta, V = -(1 + kappa/4 |q|^2)^2, which is
/// linearizable for every kappa.
SystemSpec corollary3_system(int n, double kappa);

}  // namespace geolin

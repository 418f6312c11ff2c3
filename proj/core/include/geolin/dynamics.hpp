#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "geolin/system.hpp"

namespace geolin {

/// Uniform-grid trajectory with constraint and Jacobi-time columns,
/// plus optional transform/charge columns appended by later passes.
struct Trajectory {
  std::string system;
  double dt = 0.0;
  std::vector<double> t;
  std::vector<std::vector<double>> q;     // one state vector per grid point
  std::vector<std::vector<double>> qdot;
  std::vector<double> H;    // (1/2) g(qdot,qdot) + V
  std::vector<double> tau;  // trapezoid accumulation of V dt
  std::vector<std::string> extra_names;
  std::vector<std::vector<double>> extra;  // column-major, one vector per name
  bool truncated = false;
  double truncated_at = 0.0;

  int steps() const { return static_cast<int>(t.size()); }
  std::string to_csv(const std::vector<std::string>& coords) const;
};

/// Accelerations of the gauge-fixed equations of motion,
/// qdd^i = -Gamma^i_jk qd^j qd^k - g^ij dV/dq^j.
std::vector<double> eom_rhs(const SystemSpec& s, const std::vector<double>& q,
                            const std::vector<double>& qdot);

/// Scale direction d so the zero-energy constraint holds:
/// (1/2) lambda^2 g(d,d) = -V. Throws when the signs make that impossible.
std::vector<double> project_to_constraint(const SystemSpec& s,
                                          const std::vector<double>& q,
                                          const std::vector<double>& d);

/// Fixed-step RK4. Leaves early with the truncation flag set when the
/// state exits the domain box or trips a guard.
Trajectory integrate(const SystemSpec& s, const std::vector<double>& q0,
                     const std::vector<double>& qdot0, double T, double dt);

/// Integrate a null geodesic of the potential lift with fiber momentum
/// I0 (+-1 only) and compare its base-coordinate projection against the
/// direct integration. Returns the lifted trajectory and the maximum
/// position discrepancy.
std::pair<Trajectory, double> null_lift_recover(const SystemSpec& s, double I0,
                                                const std::vector<double>& q0,
                                                const std::vector<double>& qdot0,
                                                double T, double dt);

/// Append columns U^A_k = maps(q_k). On a domain error the trajectory is
/// truncated at the offending row.
void apply_transform(const Transform& tr, const SystemSpec& s, Trajectory& traj);

/// sigma_2 / sigma_1 of the centered point matrix; zero iff collinear.
double straightness_residual(const std::vector<std::vector<double>>& points);

/// Least-squares linear fit of the given extra columns against tau;
/// returns max fit error over column range. Requires monotone tau.
double affine_check(const Trajectory& traj, const std::vector<int>& columns);

/// Phase-space observable over coordinates and momenta p_<coord>.
struct ChargeSpec {
  std::string name;
  Expr phi;
  std::string note;
};

/// The Hamiltonian (1/2) g^ij p_i p_j + V as a phase-space expression;
/// the inverse metric is built symbolically (dimension <= 4).
Expr hamiltonian_expr(const SystemSpec& s);

/// Charge from a point-symmetry generator:
/// Phi = xi * H - eta^i p_i + f, with H the phase-space Hamiltonian.
ChargeSpec noether_charge_from_generator(const SystemSpec& s, const Generator& g);

struct DriftStats {
  double initial = 0.0;
  double max_abs = 0.0;
  double normalized = 0.0;  // max_abs / max(|initial|, 1)
};

DriftStats charge_drift(const ChargeSpec& ch, const SystemSpec& s,
                        const Trajectory& traj);

struct WeakNoetherResult {
  double onshell_max = 0.0;   // max |{Phi,H}| on the constraint surface
  double chi = 0.0;           // fitted factor in {Phi,H} = chi * H off-shell
  double fit_residual = 0.0;  // relative l2 misfit of the chi model
  bool chi_valid = false;     // fit_residual < 1e-6
};

/// Evaluate the Poisson bracket {Phi,H} with jets in the 2n phase
/// variables: on the constraint surface it should vanish, and off-shell
/// it should be proportional to H for a weakly conserved charge.
WeakNoetherResult weak_noether_check(const SystemSpec& s, const ChargeSpec& ch,
                                     int samples, std::uint64_t seed);

}  // namespace geolin

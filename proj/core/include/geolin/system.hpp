#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "geolin/expr.hpp"
#include "geolin/metric.hpp"

namespace geolin {

/// A claimed flat chart for one of the derived metrics.
struct Transform {
  std::string name;
  std::string target;  // "jacobi-canonical" | "jacobi-inverse" | "lift"
  std::vector<std::string> new_coords;
  std::vector<Expr> maps;  // one per new coordinate
};

/// Point-symmetry generator with time component xi, spatial components
/// eta, and boundary term f.
struct Generator {
  std::string name;
  Expr xi;
  std::vector<Expr> eta;  // one per coordinate
  Expr boundary;
};

/// Constraint Hamiltonian system: kinetic metric, potential, sampling
/// domain, and optional transform/generator annotations. The lapse is
/// fixed to 1 throughout; energy offsets are folded into the potential.
struct SystemSpec {
  std::string name;
  MetricField g;  // carries coordinates and parameter bindings
  Expr potential;
  std::vector<std::pair<double, double>> domain;  // per coordinate
  std::vector<Expr> guards;
  std::vector<Transform> transforms;
  std::vector<Generator> generators;

  int dim() const { return g.dim(); }
  const std::vector<std::string>& coords() const { return g.coords; }
  const std::map<std::string, double>& params() const { return g.params; }
};

/// Parse and validate a system document. Throws SpecError carrying a
/// JSON-pointer-style path, or ParseError for bad expression text.
SystemSpec load_system(const std::string& json_text);

/// Inverse of load_system up to formatting; load(serialize(s)) == s.
std::string serialize_system(const SystemSpec& s);

enum class JacobiConvention { Canonical, Inverse };

/// Conformal kinetic metric absorbing the potential: V*g (canonical) or
/// g/V (the convention several worked examples print).
MetricField jacobi_metric(const SystemSpec& s, JacobiConvention c);

/// (n+1)-dim lift g ⊕ (1/V) dz² with null fiber direction z.
MetricField eisenhart_lift(const SystemSpec& s, const std::string& fiber = "z");

/// (n+1)-dim lift of the Jacobi metric, ḡ ⊕ dz².
MetricField jacobi_eisenhart_lift(const SystemSpec& s, JacobiConvention c,
                                  const std::string& fiber = "z");

MetricField conformal_rescale(const MetricField& m, const Expr& factor);

/// Tabulated rectifying chart for one-dimensional systems:
/// Y(q) = integral from q0 to q of sqrt(1/|V|).
class Flatten1D {
 public:
  Flatten1D(std::vector<double> nodes, std::vector<double> vals,
            std::vector<double> slopes);
  double operator()(double q) const;  // cubic Hermite between nodes
  double lower() const { return nodes_.front(); }

 private:
  std::vector<double> nodes_, vals_, slopes_;
};

/// Requires n == 1 and V single-signed over the domain.
Flatten1D flatten_1d(const SystemSpec& s);

/// Deterministic rejection sampler over a domain box. A candidate is
/// rejected when any |guard| < 1e-10, when |det g| <= 1e-12 (max |g_ij|)^n,
/// or when any expression hits a domain error. The random stream advances
/// one block per candidate, so runs with the same seed share a prefix.
std::vector<std::vector<double>> sample_points(
    const MetricField& m, const std::vector<std::pair<double, double>>& box,
    const std::vector<Expr>& guards, int count, std::uint64_t seed);

/// Samples the base system; guards are the declared guards plus V itself.
std::vector<std::vector<double>> sample_points(const SystemSpec& s, int count,
                                               std::uint64_t seed);

namespace rng_detail {
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};
}  // namespace rng_detail

}  // namespace geolin

#include "geolin/classify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geolin/curvature.hpp"
#include "geolin/errors.hpp"
#include "json.hpp"

namespace geolin {

namespace {

constexpr double kPass = 1e-8;
constexpr double kFail = 1e-4;

std::vector<std::vector<double>> with_fiber(
    const std::vector<std::vector<double>>& pts) {
  std::vector<std::vector<double>> out = pts;
  for (auto& p : out) p.push_back(0.0);
  return out;
}

}  // namespace

std::string to_string(Decision d) {
  switch (d) {
    case Decision::Linearizable: return "LINEARIZABLE";
    case Decision::NotLinearizable: return "NOT_LINEARIZABLE";
    default: return "INDETERMINATE";
  }
}

MaxSymReport maximal_symmetry_test(const MetricField& m,
                                   const std::vector<std::vector<double>>& pts) {
  MaxSymReport r;
  for (const auto& p : pts) {
    CurvatureEval ev(m, p);
    auto [K, res] = ev.constant_curvature();
    r.K.push_back(K);
    r.residual.push_back(res);
    r.residual_max = std::max(r.residual_max, res);
  }
  const double count = static_cast<double>(r.K.size());
  for (double k : r.K) r.K_mean += k;
  if (count > 0) r.K_mean /= count;
  for (double k : r.K) r.K_std += (k - r.K_mean) * (k - r.K_mean);
  if (count > 0) r.K_std = std::sqrt(r.K_std / count);
  bool all_zero = true;
  for (double k : r.K)
    if (std::abs(k) >= 1e-10) all_zero = false;
  double spread = r.K_std / (std::abs(r.K_mean) + 1e-12);
  r.pass = r.residual_max < kPass && (spread < 1e-6 || all_zero);
  return r;
}

ConformalReport conformal_flatness_test(
    const MetricField& m, const std::vector<std::vector<double>>& pts) {
  ConformalReport r;
  const int n = m.dim();
  if (n <= 2) {
    r.kind = "dim<=2";
    r.residual.assign(pts.size(), 0.0);
    return r;
  }
  r.kind = (n == 3) ? "cotton" : "weyl";
  for (const auto& p : pts) {
    CurvatureEval ev(m, p);
    double res = (n == 3) ? ev.cotton_norm() : ev.weyl_norm();
    r.residual.push_back(res);
    r.residual_max = std::max(r.residual_max, res);
  }
  return r;
}

int Verdict::noether_count() const {
  return decision == Decision::Linearizable ? n * (n + 1) / 2 : 0;
}

Verdict classify(const SystemSpec& s, int samples, std::uint64_t seed) {
  Verdict v;
  v.system = s.name;
  v.n = s.dim();
  v.seed = seed;

  if (v.n == 1) {
    v.decision = Decision::Linearizable;
    v.conformal.kind = "dim<=2";
    v.conformal_inverse.kind = "dim<=2";
    v.points = 0;
    return v;
  }

  std::vector<std::vector<double>> pts = sample_points(s, samples, seed);
  v.points = static_cast<int>(pts.size());

  v.max_sym = maximal_symmetry_test(jacobi_metric(s, JacobiConvention::Canonical), pts);
  v.max_sym_inverse =
      maximal_symmetry_test(jacobi_metric(s, JacobiConvention::Inverse), pts);
  auto lifted = with_fiber(pts);
  v.conformal = conformal_flatness_test(eisenhart_lift(s), lifted);
  v.conformal_inverse = conformal_flatness_test(
      conformal_rescale(jacobi_eisenhart_lift(s, JacobiConvention::Inverse),
                        s.potential),
      lifted);

  double best =
      std::min(v.conformal.residual_max, v.conformal_inverse.residual_max);
  if (best < kPass)
    v.decision = Decision::Linearizable;
  else if (best > kFail)
    v.decision = Decision::NotLinearizable;
  else
    v.decision = Decision::Indeterminate;
  return v;
}

std::string Verdict::to_json() const {
  nlohmann::ordered_json j;
  j["system"] = system;
  j["n"] = n;
  j["decision"] = to_string(decision);
  auto stats = [](const MaxSymReport& r) {
    nlohmann::ordered_json s;
    s["K_mean"] = r.K_mean;
    s["K_std"] = r.K_std;
    s["residual_max"] = r.residual_max;
    s["pass"] = r.pass;
    return s;
  };
  nlohmann::ordered_json ev;
  ev["max_sym"] = stats(max_sym);
  nlohmann::ordered_json pc;
  pc["canonical"] = stats(max_sym);
  pc["inverse"] = stats(max_sym_inverse);
  ev["per_convention"] = pc;
  nlohmann::ordered_json cf;
  cf["kind"] = conformal.kind;
  cf["residual_max"] =
      std::min(conformal.residual_max, conformal_inverse.residual_max);
  cf["canonical_family"] = conformal.residual_max;
  cf["inverse_family"] = conformal_inverse.residual_max;
  ev["conformal"] = cf;
  j["evidence"] = ev;
  j["seed"] = seed;
  j["points"] = points;
  nlohmann::ordered_json th;
  th["pass"] = pass_threshold;
  th["fail"] = fail_threshold;
  j["thresholds"] = th;
  j["noether_count"] = noether_count();
  return j.dump(2);
}

SystemSpec corollary3_system(int n, double kappa) {
  if (n < 2) throw NumericError("corollary3_system requires dimension >= 2");
  std::ostringstream doc;
  doc << "{\"name\":\"corollary3-n" << n << "\",\"coordinates\":[";
  for (int i = 0; i < n; ++i) doc << (i ? "," : "") << "\"q" << i + 1 << "\"";
  doc << "],\"parameters\":{\"kappa\":" << kappa << "},\"metric\":[";
  for (int i = 0; i < n; ++i) {
    doc << (i ? ",[" : "[");
    for (int j = 0; j < n; ++j)
      doc << (j ? "," : "") << "\"" << (i == j ? 1 : 0) << "\"";
    doc << "]";
  }
  doc << "],\"potential\":\"-(1 + kappa/4*(";
  for (int i = 0; i < n; ++i) doc << (i ? " + " : "") << "q" << i + 1 << "^2";
  doc << "))^2\",\"domain\":{";
  for (int i = 0; i < n; ++i)
    doc << (i ? "," : "") << "\"q" << i + 1 << "\":[-0.8,0.8]";
  doc << "}}";
  return load_system(doc.str());
}

}  // namespace geolin

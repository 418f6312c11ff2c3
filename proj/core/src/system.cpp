#include "geolin/system.hpp"

#include <algorithm>
#include <cmath>

#include "geolin/errors.hpp"
#include "json.hpp"

namespace geolin {

namespace {

using json = nlohmann::ordered_json;

bool is_zero_const(const Expr& e) {
  return e->kind == NodeKind::Constant && e->value == 0.0;
}

Expr parse_at(const json& j, const std::string& path) {
  if (!j.is_string()) throw SpecError("expected expression string", path);
  try {
    return parse(j.get<std::string>());
  } catch (const ParseError& pe) {
    throw SpecError(std::string("expression parse error: ") + pe.what(), path);
  }
}

void check_symbols(const Expr& e, const std::vector<std::string>& allowed,
                   const std::string& path) {
  std::vector<std::string> bad = validate_symbols(e, allowed);
  if (!bad.empty())
    throw SpecError("unknown symbol '" + bad.front() + "'", path);
}

}  // namespace

SystemSpec load_system(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& pe) {
    throw SpecError(std::string("invalid JSON: ") + pe.what(), "/");
  }
  if (!doc.is_object()) throw SpecError("document must be an object", "/");
  for (const char* key : {"name", "coordinates", "metric", "potential", "domain"})
    if (!doc.contains(key))
      throw SpecError(std::string("missing required field '") + key + "'", "/");

  SystemSpec s;
  if (!doc["name"].is_string()) throw SpecError("name must be a string", "/name");
  s.name = doc["name"].get<std::string>();

  if (!doc["coordinates"].is_array() || doc["coordinates"].empty())
    throw SpecError("coordinates must be a nonempty array", "/coordinates");
  for (std::size_t i = 0; i < doc["coordinates"].size(); ++i) {
    const auto& c = doc["coordinates"][i];
    if (!c.is_string())
      throw SpecError("coordinate must be a string",
                      "/coordinates/" + std::to_string(i));
    s.g.coords.push_back(c.get<std::string>());
  }
  const int n = s.dim();

  if (doc.contains("parameters")) {
    if (!doc["parameters"].is_object())
      throw SpecError("parameters must be an object", "/parameters");
    for (auto& [k, v] : doc["parameters"].items()) {
      if (!v.is_number())
        throw SpecError("parameter must be a number", "/parameters/" + k);
      s.g.params[k] = v.get<double>();
    }
  }

  std::vector<std::string> allowed = s.g.coords;
  for (const auto& [k, v] : s.g.params) allowed.push_back(k);

  const json& met = doc["metric"];
  if (!met.is_array() || static_cast<int>(met.size()) != n)
    throw SpecError("metric must be an " + std::to_string(n) + "x" +
                        std::to_string(n) + " array",
                    "/metric");
  s.g.comp.assign(n * n, ex::constant(0.0));
  for (int i = 0; i < n; ++i) {
    if (!met[i].is_array() || static_cast<int>(met[i].size()) != n)
      throw SpecError("metric row has wrong length", "/metric/" + std::to_string(i));
    for (int j = 0; j < n; ++j) {
      std::string path = "/metric/" + std::to_string(i) + "/" + std::to_string(j);
      Expr e = parse_at(met[i][j], path);
      check_symbols(e, allowed, path);
      s.g.at(i, j) = e;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!equal(s.g.at(i, j), s.g.at(j, i)))
        throw SpecError("metric not symmetric at (" + s.g.coords[i] + "," +
                            s.g.coords[j] + ")",
                        "/metric/" + std::to_string(j) + "/" + std::to_string(i));

  s.potential = parse_at(doc["potential"], "/potential");
  check_symbols(s.potential, allowed, "/potential");

  const json& dom = doc["domain"];
  if (!dom.is_object()) throw SpecError("domain must be an object", "/domain");
  s.domain.resize(n);
  for (int i = 0; i < n; ++i) {
    const std::string& c = s.g.coords[i];
    if (!dom.contains(c))
      throw SpecError("domain missing coordinate '" + c + "'", "/domain");
    const json& iv = dom[c];
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
      throw SpecError("domain interval must be [lo, hi]", "/domain/" + c);
    double lo = iv[0].get<double>(), hi = iv[1].get<double>();
    if (!(lo < hi)) throw SpecError("empty domain interval", "/domain/" + c);
    s.domain[i] = {lo, hi};
  }

  if (doc.contains("guards")) {
    if (!doc["guards"].is_array())
      throw SpecError("guards must be an array", "/guards");
    for (std::size_t i = 0; i < doc["guards"].size(); ++i) {
      std::string path = "/guards/" + std::to_string(i);
      Expr e = parse_at(doc["guards"][i], path);
      check_symbols(e, allowed, path);
      s.guards.push_back(e);
    }
  }

  if (doc.contains("transforms")) {
    if (!doc["transforms"].is_array())
      throw SpecError("transforms must be an array", "/transforms");
    for (std::size_t ti = 0; ti < doc["transforms"].size(); ++ti) {
      std::string base = "/transforms/" + std::to_string(ti);
      const json& tj = doc["transforms"][ti];
      if (!tj.is_object() || !tj.contains("name") || !tj.contains("target") ||
          !tj.contains("maps"))
        throw SpecError("transform needs name, target, maps", base);
      Transform t;
      t.name = tj["name"].get<std::string>();
      t.target = tj["target"].get<std::string>();
      if (t.target != "jacobi-canonical" && t.target != "jacobi-inverse" &&
          t.target != "lift")
        throw SpecError("unknown transform target '" + t.target + "'",
                        base + "/target");
      int want = (t.target == "lift") ? n + 1 : n;
      if (!tj["maps"].is_object() ||
          static_cast<int>(tj["maps"].size()) != want)
        throw SpecError("transform needs " + std::to_string(want) + " maps",
                        base + "/maps");
      std::vector<std::string> tallowed = allowed;
      if (t.target == "lift") tallowed.push_back("z");
      for (auto& [k, v] : tj["maps"].items()) {
        std::string path = base + "/maps/" + k;
        Expr e = parse_at(v, path);
        check_symbols(e, tallowed, path);
        t.new_coords.push_back(k);
        t.maps.push_back(e);
      }
      s.transforms.push_back(std::move(t));
    }
  }

  if (doc.contains("generators")) {
    if (!doc["generators"].is_array())
      throw SpecError("generators must be an array", "/generators");
    for (std::size_t gi = 0; gi < doc["generators"].size(); ++gi) {
      std::string base = "/generators/" + std::to_string(gi);
      const json& gj = doc["generators"][gi];
      if (!gj.is_object() || !gj.contains("name") || !gj.contains("xi") ||
          !gj.contains("eta") || !gj.contains("boundary"))
        throw SpecError("generator needs name, xi, eta, boundary", base);
      Generator g;
      g.name = gj["name"].get<std::string>();
      g.xi = parse_at(gj["xi"], base + "/xi");
      check_symbols(g.xi, allowed, base + "/xi");
      if (!gj["eta"].is_object())
        throw SpecError("eta must be an object", base + "/eta");
      for (int i = 0; i < n; ++i) {
        const std::string& c = s.g.coords[i];
        if (!gj["eta"].contains(c))
          throw SpecError("eta missing coordinate '" + c + "'", base + "/eta");
        std::string path = base + "/eta/" + c;
        Expr e = parse_at(gj["eta"][c], path);
        check_symbols(e, allowed, path);
        g.eta.push_back(e);
      }
      g.boundary = parse_at(gj["boundary"], base + "/boundary");
      check_symbols(g.boundary, allowed, base + "/boundary");
      s.generators.push_back(std::move(g));
    }
  }

  return s;
}

std::string serialize_system(const SystemSpec& s) {
  const int n = s.dim();
  json doc;
  doc["name"] = s.name;
  doc["coordinates"] = s.g.coords;
  json params = json::object();
  for (const auto& [k, v] : s.g.params) params[k] = v;
  doc["parameters"] = params;
  json met = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int j = 0; j < n; ++j) row.push_back(print(s.g.at(i, j)));
    met.push_back(row);
  }
  doc["metric"] = met;
  doc["potential"] = print(s.potential);
  json dom = json::object();
  for (int i = 0; i < n; ++i)
    dom[s.g.coords[i]] = json::array({s.domain[i].first, s.domain[i].second});
  doc["domain"] = dom;
  if (!s.guards.empty()) {
    json g = json::array();
    for (const Expr& e : s.guards) g.push_back(print(e));
    doc["guards"] = g;
  }
  if (!s.transforms.empty()) {
    json ts = json::array();
    for (const Transform& t : s.transforms) {
      json tj;
      tj["name"] = t.name;
      tj["target"] = t.target;
      json maps = json::object();
      for (std::size_t i = 0; i < t.maps.size(); ++i)
        maps[t.new_coords[i]] = print(t.maps[i]);
      tj["maps"] = maps;
      ts.push_back(tj);
    }
    doc["transforms"] = ts;
  }
  if (!s.generators.empty()) {
    json gs = json::array();
    for (const Generator& g : s.generators) {
      json gj;
      gj["name"] = g.name;
      gj["xi"] = print(g.xi);
      json eta = json::object();
      for (int i = 0; i < n; ++i) eta[s.g.coords[i]] = print(g.eta[i]);
      gj["eta"] = eta;
      gj["boundary"] = print(g.boundary);
      gs.push_back(gj);
    }
    doc["generators"] = gs;
  }
  return doc.dump(2);
}

MetricField jacobi_metric(const SystemSpec& s, JacobiConvention c) {
  MetricField m;
  m.coords = s.g.coords;
  m.params = s.g.params;
  m.comp.reserve(s.g.comp.size());
  for (const Expr& e : s.g.comp) {
    if (is_zero_const(e)) {
      m.comp.push_back(e);
    } else if (c == JacobiConvention::Canonical) {
      m.comp.push_back(ex::mul(s.potential, e));
    } else {
      m.comp.push_back(ex::div(e, s.potential));
    }
  }
  return m;
}

MetricField eisenhart_lift(const SystemSpec& s, const std::string& fiber) {
  for (const std::string& c : s.g.coords)
    if (c == fiber)
      throw SpecError("fiber name collides with coordinate '" + fiber + "'",
                      "/coordinates");
  const int n = s.dim();
  MetricField m;
  m.coords = s.g.coords;
  m.coords.push_back(fiber);
  m.params = s.g.params;
  m.comp.assign((n + 1) * (n + 1), ex::constant(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.at(i, j) = s.g.at(i, j);
  m.at(n, n) = ex::div(ex::constant(1.0), s.potential);
  return m;
}

MetricField jacobi_eisenhart_lift(const SystemSpec& s, JacobiConvention c,
                                  const std::string& fiber) {
  for (const std::string& coord : s.g.coords)
    if (coord == fiber)
      throw SpecError("fiber name collides with coordinate '" + fiber + "'",
                      "/coordinates");
  MetricField base = jacobi_metric(s, c);
  const int n = s.dim();
  MetricField m;
  m.coords = base.coords;
  m.coords.push_back(fiber);
  m.params = base.params;
  m.comp.assign((n + 1) * (n + 1), ex::constant(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.at(i, j) = base.at(i, j);
  m.at(n, n) = ex::constant(1.0);
  return m;
}

MetricField conformal_rescale(const MetricField& m, const Expr& factor) {
  MetricField r = m;
  for (Expr& e : r.comp)
    if (!is_zero_const(e)) e = ex::mul(factor, e);
  return r;
}

Flatten1D::Flatten1D(std::vector<double> nodes, std::vector<double> vals,
                     std::vector<double> slopes)
    : nodes_(std::move(nodes)), vals_(std::move(vals)), slopes_(std::move(slopes)) {}

double Flatten1D::operator()(double q) const {
  const std::size_t m = nodes_.size();
  std::size_t k = std::upper_bound(nodes_.begin(), nodes_.end(), q) - nodes_.begin();
  if (k == 0) k = 1;
  if (k >= m) k = m - 1;
  double h = nodes_[k] - nodes_[k - 1];
  double t = (q - nodes_[k - 1]) / h;
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * vals_[k - 1] + h * h10 * slopes_[k - 1] + h01 * vals_[k] +
         h * h11 * slopes_[k];
}

Flatten1D flatten_1d(const SystemSpec& s) {
  if (s.dim() != 1)
    throw NumericError("flatten_1d requires a one-dimensional system");
  const auto [lo, hi] = s.domain[0];
  std::map<std::string, double> env = s.g.params;
  const std::string& q = s.g.coords[0];
  auto V = [&](double x) {
    env[q] = x;
    return eval_scalar(s.potential, env);
  };
  auto f = [&](double x) {
    double v = V(x);
    if (v == 0.0) throw NumericError("potential vanishes in domain");
    return std::sqrt(1.0 / std::abs(v));
  };
  const int kIntervals = 1024;
  double h = (hi - lo) / kIntervals;
  double sign0 = V(lo) > 0 ? 1.0 : -1.0;
  std::vector<double> nodes(kIntervals + 1), vals(kIntervals + 1),
      slopes(kIntervals + 1);
  double acc = 0.0;
  nodes[0] = lo;
  vals[0] = 0.0;
  slopes[0] = f(lo);
  for (int k = 1; k <= kIntervals; ++k) {
    double a = lo + (k - 1) * h, b = lo + k * h;
    double va = V(a), vm = V((a + b) / 2), vb = V(b);
    for (double v : {va, vm, vb})
      if ((v > 0 ? 1.0 : -1.0) != sign0 || v == 0.0)
        throw NumericError("potential changes sign in domain");
    acc += h / 6.0 *
           (std::sqrt(1.0 / std::abs(va)) + 4.0 * std::sqrt(1.0 / std::abs(vm)) +
            std::sqrt(1.0 / std::abs(vb)));
    nodes[k] = b;
    vals[k] = acc;
    slopes[k] = std::sqrt(1.0 / std::abs(vb));
  }
  return Flatten1D(std::move(nodes), std::move(vals), std::move(slopes));
}

std::vector<std::vector<double>> sample_points(
    const MetricField& m, const std::vector<std::pair<double, double>>& box,
    const std::vector<Expr>& guards, int count, std::uint64_t seed) {
  if (count < 1) throw NumericError("sample count must be positive");
  const int n = m.dim();
  rng_detail::SplitMix64 rng{seed};
  std::vector<std::vector<double>> out;
  out.reserve(count);
  std::vector<long> guard_hits(guards.size(), 0);
  long attempts = 0;
  const long budget = 1000L * count;
  std::map<std::string, double> env;
  while (static_cast<int>(out.size()) < count) {
    if (attempts++ >= budget) {
      std::size_t worst = 0;
      for (std::size_t i = 1; i < guard_hits.size(); ++i)
        if (guard_hits[i] > guard_hits[worst]) worst = i;
      std::string why = guards.empty()
                            ? "metric determinant or domain errors"
                            : "guard " + print(guards[worst]);
      throw NumericError("sampling exhausted after " + std::to_string(budget) +
                         " attempts; tightest rejection: " + why);
    }
    std::vector<double> p(n);
    for (int i = 0; i < n; ++i)
      p[i] = box[i].first + rng.uniform() * (box[i].second - box[i].first);
    env = m.params;
    for (int i = 0; i < n; ++i) env[m.coords[i]] = p[i];
    bool ok = true;
    for (std::size_t gi = 0; gi < guards.size() && ok; ++gi) {
      try {
        if (std::abs(eval_scalar(guards[gi], env)) < 1e-10) {
          ok = false;
          ++guard_hits[gi];
        }
      } catch (const EvalError&) {
        ok = false;
        ++guard_hits[gi];
      }
    }
    if (!ok) continue;
    try {
      std::vector<double> gv = m.eval_values(p);
      double gmax = 0.0;
      for (double x : gv) gmax = std::max(gmax, std::abs(x));
      double floor = 1e-12 * std::pow(std::max(gmax, 1e-30), n);
      if (std::abs(m.det_at(p)) <= floor) continue;
    } catch (const EvalError&) {
      continue;
    } catch (const NumericError&) {
      continue;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::vector<double>> sample_points(const SystemSpec& s, int count,
                                               std::uint64_t seed) {
  std::vector<Expr> guards = s.guards;
  guards.push_back(s.potential);
  return sample_points(s.g, s.domain, guards, count, seed);
}

}  // namespace geolin

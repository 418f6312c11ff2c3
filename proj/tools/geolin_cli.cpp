// Command-line front end: validate system specs, classify, integrate,
// verify dynamics claims, and drive the built-in catalog.
//
// Exit codes: 0 ok/linearizable, 1 validation failure, 2 I/O failure,
// 3 not linearizable, 4 indeterminate, 5 numeric failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "geolin/catalog.hpp"
#include "geolin/classify.hpp"
#include "geolin/curvature.hpp"
#include "geolin/dynamics.hpp"
#include "geolin/errors.hpp"
#include "geolin/system.hpp"
#include "json.hpp"

namespace {

using geolin::CatalogEntry;
using geolin::SystemSpec;

struct RunConfig {
  std::string input;         // spec file path
  std::string catalog_name;  // or built-in entry
  std::uint64_t seed = 0;
  int samples = 50;
  double dt = 1e-3;
  double horizon = 0.5;
  bool horizon_set = false;
  std::vector<std::string> sets;
  std::string output;
  std::string format = "json";
  bool verbose = false;
};

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--samples", cfg.samples, "sample point count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--dt", cfg.dt, "integration step")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", cfg.horizon, "integration horizon")
      ->check(CLI::PositiveNumber)
      ->each([&cfg](const std::string&) { cfg.horizon_set = true; });
  cmd->add_option("--set", cfg.sets, "parameter override name=value");
  cmd->add_option("--output", cfg.output, "output file (default stdout)");
  cmd->add_option("--format", cfg.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_flag("--verbose", cfg.verbose, "include tensor payloads");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw std::ios_base::failure("cannot write '" + cfg.output + "'");
  out << text << "\n";
}

void apply_sets(SystemSpec& s, const RunConfig& cfg,
                nlohmann::ordered_json* overrides) {
  for (const std::string& kv : cfg.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw geolin::SpecError("--set expects name=value, got '" + kv + "'", "/");
    std::string name = kv.substr(0, eq);
    double value = std::stod(kv.substr(eq + 1));
    if (!s.g.params.count(name))
      throw geolin::SpecError("unknown parameter '" + name + "'", "/parameters");
    s.g.params[name] = value;
    if (overrides) (*overrides)[name] = value;
  }
}

SystemSpec resolve_system(const RunConfig& cfg, const CatalogEntry** entry) {
  *entry = nullptr;
  if (!cfg.catalog_name.empty()) {
    const CatalogEntry& e = geolin::catalog_get(cfg.catalog_name);
    *entry = &e;
    return e.system;
  }
  if (cfg.input.empty())
    throw geolin::SpecError("no input: give a spec file or --catalog", "/");
  return geolin::load_system(read_file(cfg.input));
}

int decision_exit(geolin::Decision d) {
  switch (d) {
    case geolin::Decision::Linearizable: return 0;
    case geolin::Decision::NotLinearizable: return 3;
    default: return 4;
  }
}

int cmd_validate(const RunConfig& cfg) {
  try {
    geolin::load_system(read_file(cfg.input));
  } catch (const geolin::SpecError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return 1;
  }
  std::cout << "ok\n";
  return 0;
}

int cmd_analyze(RunConfig& cfg) {
  const CatalogEntry* entry = nullptr;
  SystemSpec s = resolve_system(cfg, &entry);
  nlohmann::ordered_json overrides = nlohmann::ordered_json::object();
  apply_sets(s, cfg, &overrides);
  geolin::Verdict v = geolin::classify(s, cfg.samples, cfg.seed);
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(v.to_json());
  if (!overrides.empty()) j["overrides"] = overrides;
  emit(cfg, j.dump(2));
  return decision_exit(v.decision);
}

std::pair<std::vector<double>, std::vector<double>> initial_data(
    const RunConfig& cfg, const CatalogEntry* entry, const SystemSpec& s,
    const std::vector<double>& q0_opt, const std::vector<double>& dir_opt,
    double* T) {
  std::vector<double> q0 = q0_opt, dir = dir_opt;
  *T = cfg.horizon;
  if (entry && entry->has_fixture) {
    if (q0.empty()) q0 = entry->fixture.q0;
    if (dir.empty()) dir = entry->fixture.direction;
    if (!cfg.horizon_set) *T = entry->fixture.T;
  }
  if (q0.empty() || dir.empty())
    throw geolin::SpecError("initial data required: --q0 and --dir", "/");
  if (static_cast<int>(q0.size()) != s.dim() ||
      static_cast<int>(dir.size()) != s.dim())
    throw geolin::SpecError("initial data has wrong dimension", "/");
  return {q0, dir};
}

int cmd_integrate(RunConfig& cfg, const std::vector<double>& q0_opt,
                  const std::vector<double>& dir_opt) {
  const CatalogEntry* entry = nullptr;
  SystemSpec s = resolve_system(cfg, &entry);
  apply_sets(s, cfg, nullptr);
  double T = 0.0;
  auto [q0, dir] = initial_data(cfg, entry, s, q0_opt, dir_opt, &T);
  std::vector<double> qd = geolin::project_to_constraint(s, q0, dir);
  geolin::Trajectory traj = geolin::integrate(s, q0, qd, T, cfg.dt);
  for (const geolin::Transform& tr : s.transforms)
    geolin::apply_transform(tr, s, traj);
  for (const geolin::Generator& g : s.generators) {
    geolin::ChargeSpec ch = geolin::noether_charge_from_generator(s, g);
    std::vector<double> col;
    std::map<std::string, double> env;
    for (int k = 0; k < traj.steps(); ++k) {
      std::vector<double> gv = s.g.eval_values(traj.q[k]);
      env = s.g.params;
      for (int i = 0; i < s.dim(); ++i) {
        env[s.g.coords[i]] = traj.q[k][i];
        double p = 0.0;
        for (int j = 0; j < s.dim(); ++j)
          p += gv[i * s.dim() + j] * traj.qdot[k][j];
        env["p_" + s.g.coords[i]] = p;
      }
      col.push_back(geolin::eval_scalar(ch.phi, env));
    }
    traj.extra_names.push_back("Phi_" + g.name);
    traj.extra.push_back(std::move(col));
  }
  emit(cfg, traj.to_csv(s.g.coords));
  return 0;
}

int cmd_verify(RunConfig& cfg, const std::string& what,
               const std::vector<double>& q0_opt,
               const std::vector<double>& dir_opt) {
  const CatalogEntry* entry = nullptr;
  SystemSpec s = resolve_system(cfg, &entry);
  apply_sets(s, cfg, nullptr);
  double T = 0.0;
  auto [q0, dir] = initial_data(cfg, entry, s, q0_opt, dir_opt, &T);
  std::vector<double> qd = geolin::project_to_constraint(s, q0, dir);
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  bool all = true;
  auto item = [&](const std::string& name, double measured, double tol,
                  bool pass) {
    nlohmann::ordered_json j;
    j["check"] = name;
    j["measured"] = measured;
    j["tolerance"] = tol;
    j["pass"] = pass;
    items.push_back(j);
    all = all && pass;
  };
  if (what == "transform") {
    if (s.transforms.empty())
      throw geolin::SpecError("no transforms declared in this spec", "/transforms");
    geolin::Trajectory traj = geolin::integrate(s, q0, qd, T, cfg.dt);
    for (const geolin::Transform& tr : s.transforms) {
      geolin::Trajectory mapped = traj;
      geolin::apply_transform(tr, s, mapped);
      std::vector<std::vector<double>> pts(mapped.steps());
      for (int k = 0; k < mapped.steps(); ++k)
        for (const auto& col : mapped.extra) pts[k].push_back(col[k]);
      double st = geolin::straightness_residual(pts);
      item("straightness:" + tr.name, st, 1e-6, st < 1e-6);
    }
  } else if (what == "charges") {
    if (s.generators.empty())
      throw geolin::SpecError("no generators declared in this spec", "/generators");
    geolin::Trajectory traj = geolin::integrate(s, q0, qd, T, cfg.dt);
    for (const geolin::Generator& g : s.generators) {
      geolin::ChargeSpec ch = geolin::noether_charge_from_generator(s, g);
      geolin::DriftStats d = geolin::charge_drift(ch, s, traj);
      item("charge-drift:" + g.name, d.normalized, 1e-7, d.normalized < 1e-7);
    }
  } else if (what == "lift-recovery") {
    for (double I0 : {1.0, -1.0}) {
      auto [lifted, resid] = geolin::null_lift_recover(s, I0, q0, qd, T, cfg.dt);
      item("lift-recovery:I0=" + std::to_string(static_cast<int>(I0)), resid,
           1e-8, resid < 1e-8);
    }
  } else {
    throw geolin::SpecError("unknown verify target '" + what + "'", "/");
  }
  emit(cfg, items.dump(2));
  return all ? 0 : 5;
}

int cmd_catalog(RunConfig& cfg, const std::string& sub, const std::string& name) {
  if (sub == "list") {
    std::string out;
    for (const std::string& n : geolin::catalog_list()) out += n + "\n";
    out.pop_back();
    emit(cfg, out);
    return 0;
  }
  if (sub == "show") {
    const CatalogEntry& e = geolin::catalog_get(name);
    nlohmann::ordered_json j;
    j["name"] = e.name;
    j["notes"] = e.notes;
    j["metric_only"] = e.metric_only;
    j["spec"] = nlohmann::ordered_json::parse(geolin::serialize_system(e.system));
    j["expected_decision"] = e.expected_decision;
    emit(cfg, j.dump(2));
    return 0;
  }
  if (sub == "run-all") {
    geolin::SuiteReport rep = geolin::run_all(cfg.seed);
    emit(cfg, rep.to_json());
    return rep.all_pass() ? 0 : 5;
  }
  throw geolin::SpecError("unknown catalog action '" + sub + "'", "/");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geolin: linearizability analysis of constraint Hamiltonian systems"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* validate = app.add_subcommand("validate", "check a spec file");
  validate->add_option("path", cfg.input, "spec file")->required();

  auto* analyze = app.add_subcommand("analyze", "classify a system");
  analyze->add_option("path", cfg.input, "spec file");
  analyze->add_option("--catalog", cfg.catalog_name, "built-in entry name");
  add_common(analyze, cfg);

  std::vector<double> q0_opt, dir_opt;
  auto* integrate = app.add_subcommand("integrate", "run the dynamics");
  integrate->add_option("path", cfg.input, "spec file");
  integrate->add_option("--catalog", cfg.catalog_name, "built-in entry name");
  integrate->add_option("--q0", q0_opt, "initial position");
  integrate->add_option("--dir", dir_opt, "initial direction (projected)");
  add_common(integrate, cfg);

  std::string what;
  auto* verify = app.add_subcommand("verify", "check transforms/charges/lift");
  verify->add_option("what", what, "transform | charges | lift-recovery")
      ->required();
  verify->add_option("path", cfg.input, "spec file");
  verify->add_option("--catalog", cfg.catalog_name, "built-in entry name");
  verify->add_option("--q0", q0_opt, "initial position");
  verify->add_option("--dir", dir_opt, "initial direction (projected)");
  add_common(verify, cfg);

  std::string sub, name;
  auto* catalog = app.add_subcommand("catalog", "built-in fixtures");
  catalog->add_option("action", sub, "list | show | run-all")->required();
  catalog->add_option("name", name, "entry name for show");
  add_common(catalog, cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(cfg);
    if (analyze->parsed()) return cmd_analyze(cfg);
    if (integrate->parsed()) return cmd_integrate(cfg, q0_opt, dir_opt);
    if (verify->parsed()) return cmd_verify(cfg, what, q0_opt, dir_opt);
    if (catalog->parsed()) return cmd_catalog(cfg, sub, name);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 2;
  } catch (const geolin::SpecError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return 1;
  } catch (const geolin::ParseError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}

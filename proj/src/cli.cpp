#include "anisolab/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "anisolab/dynamics.hpp"
#include "anisolab/reduction.hpp"

namespace aniso::cli {
namespace {

namespace fs = std::filesystem;

void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown field \"" + key + "\"");
}

double number_at(const nlohmann::json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
  if (!j.at(key).is_number()) throw ConfigError(where + ": field \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

std::vector<double> vector_at(const nlohmann::json& j, const std::string& key,
                              std::size_t size, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
  const auto& v = j.at(key);
  if (!v.is_array()) throw ConfigError(where + ": field \"" + key + "\" must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(where + ": field \"" + key + "\" must hold numbers");
    out.push_back(e.get<double>());
  }
  if (out.size() != size)
    throw ConfigError(where + ": field \"" + key + "\" needs " + std::to_string(size) +
                      " entries, got " + std::to_string(out.size()));
  return out;
}

void parse_initial(const nlohmann::json& j, const SystemParams& params, SystemKind kind,
                   RunConfig& cfg) {
  const auto N = static_cast<std::size_t>(params.N);
  if (kind == SystemKind::Reduced) {
    require_keys(j, {"x", "p", "t"}, "initial");
    ReducedState s;
    s.x = vector_at(j, "x", N, "initial");
    s.p = vector_at(j, "p", N, "initial");
    s.t = j.contains("t") ? number_at(j, "t", "initial") : 0.0;
    cfg.initial_reduced = std::move(s);
  } else {
    require_keys(j, {"y", "phat", "t"}, "initial");
    FullState s;
    s.y = vector_at(j, "y", 2 * N, "initial");
    s.phat = vector_at(j, "phat", 2 * N, "initial");
    s.t = j.contains("t") ? number_at(j, "t", "initial") : 0.0;
    cfg.initial_full = std::move(s);
  }
}

SamplerConfig parse_sampler(const nlohmann::json& j, std::uint64_t default_seed) {
  require_keys(j, {"seed", "positions", "momenta"}, "sampler");
  SamplerConfig s;
  s.seed = default_seed;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer())
      throw ConfigError("sampler: field \"seed\" must be an integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("positions")) {
    const auto r = vector_at(j, "positions", 2, "sampler");
    s.x_lo = r[0];
    s.x_hi = r[1];
  }
  if (j.contains("momenta")) {
    const auto r = vector_at(j, "momenta", 2, "sampler");
    s.p_lo = r[0];
    s.p_hi = r[1];
  }
  if (!(s.x_lo < s.x_hi) || !(s.p_lo < s.p_hi))
    throw ConfigError("sampler: ranges must satisfy lo < hi");
  return s;
}

IntegratorConfig parse_integrator(const nlohmann::json& j) {
  require_keys(j, {"method", "dt", "t_end", "tol"}, "integrator");
  IntegratorConfig cfg;
  if (j.contains("method")) {
    if (!j.at("method").is_string())
      throw ConfigError("integrator: field \"method\" must be a string");
    cfg.method = parse_method(j.at("method").get<std::string>());
  }
  if (!j.contains("t_end")) throw ConfigError("integrator: missing field \"t_end\"");
  cfg.t_end = number_at(j, "t_end", "integrator");
  if (!(cfg.t_end > 0.0)) throw ConfigError("integrator: t_end must be > 0");
  if (cfg.method == Method::OracleRK54) {
    if (j.contains("tol")) cfg.tol = number_at(j, "tol", "integrator");
    if (!(cfg.tol > 0.0)) throw ConfigError("integrator: tol must be > 0");
  } else {
    if (!j.contains("dt"))
      throw ConfigError("integrator: fixed-step method needs field \"dt\"");
    cfg.dt = number_at(j, "dt", "integrator");
    if (!(cfg.dt > 0.0)) throw ConfigError("integrator: dt must be > 0");
  }
  return cfg;
}

SuiteFlags parse_suites(const nlohmann::json& j) {
  require_keys(j, {"conservation", "brackets", "rank", "period", "reduce-check"}, "suites");
  SuiteFlags f;
  auto flag = [&](const char* key, bool& slot) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_boolean())
      throw ConfigError(std::string("suites: field \"") + key + "\" must be a boolean");
    slot = j.at(key).get<bool>();
  };
  flag("conservation", f.conservation);
  flag("brackets", f.brackets);
  flag("rank", f.rank);
  flag("period", f.period);
  flag("reduce-check", f.reduce_check);
  return f;
}

// Produces the start state for single-trajectory commands; records the seed
// actually used (when sampled) for the metadata sidecar.
template <class State, class SampleFn>
State start_state(const RunConfig& cfg, const std::optional<State>& explicit_state,
                  SampleFn sample, std::optional<std::uint64_t>& used_seed) {
  if (explicit_state) return *explicit_state;
  if (!cfg.sampler)
    throw ConfigError("this command needs an \"initial\" state or a \"sampler\" block");
  used_seed = cfg.sampler->seed;
  Rng rng(cfg.sampler->seed);
  return sample(rng, *cfg.sampler);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::string pretty(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
  require_keys(j,
               {"params", "system", "initial", "sampler", "integrator", "suites",
                "bracket_samples", "seed", "perturb_k_eval", "points", "threads", "bound"},
               "config");
  if (!j.contains("params")) throw ConfigError("config: missing field \"params\"");

  RunConfig cfg;
  cfg.raw = j;
  cfg.params = validate_params(j.at("params").get<SystemParams>());

  if (j.contains("system")) {
    if (!j.at("system").is_string())
      throw ConfigError("config: field \"system\" must be \"full\" or \"reduced\"");
    const std::string s = j.at("system").get<std::string>();
    if (s == "full")
      cfg.system = SystemKind::Full;
    else if (s == "reduced")
      cfg.system = SystemKind::Reduced;
    else
      throw ConfigError("config: field \"system\" must be \"full\" or \"reduced\", got \"" + s +
                        "\"");
  }

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer())
      throw ConfigError("config: field \"seed\" must be an integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }

  if (j.contains("initial") && j.contains("sampler"))
    throw ConfigError("config: \"initial\" and \"sampler\" are mutually exclusive");
  if (j.contains("initial")) parse_initial(j.at("initial"), cfg.params, cfg.system, cfg);
  if (j.contains("sampler")) cfg.sampler = parse_sampler(j.at("sampler"), cfg.seed);

  if (j.contains("integrator")) cfg.integrator = parse_integrator(j.at("integrator"));
  if (j.contains("suites")) cfg.suites = parse_suites(j.at("suites"));

  if (j.contains("bracket_samples")) {
    if (!j.at("bracket_samples").is_number_integer())
      throw ConfigError("config: field \"bracket_samples\" must be an integer");
    cfg.bracket_samples = j.at("bracket_samples").get<int>();
    if (cfg.bracket_samples < 1) throw ConfigError("config: bracket_samples must be >= 1");
  }

  if (j.contains("perturb_k_eval")) {
    const auto& p = j.at("perturb_k_eval");
    require_keys(p, {"plane", "delta"}, "perturb_k_eval");
    PerturbK hook;
    if (!p.contains("plane") || !p.at("plane").is_number_integer())
      throw ConfigError("perturb_k_eval: integer field \"plane\" required");
    hook.plane = p.at("plane").get<int>();
    hook.delta = number_at(p, "delta", "perturb_k_eval");
    if (hook.plane < 1 || hook.plane > cfg.params.N)
      throw ConfigError("perturb_k_eval: plane must be in 1.." + std::to_string(cfg.params.N));
    cfg.perturb_k_eval = hook;
  }

  if (j.contains("points")) {
    if (!j.at("points").is_array())
      throw ConfigError("config: field \"points\" must be an array of parameter objects");
    for (const auto& p : j.at("points"))
      cfg.points.push_back(validate_params(p.get<SystemParams>()));
  }

  if (j.contains("threads")) {
    if (!j.at("threads").is_number_integer())
      throw ConfigError("config: field \"threads\" must be an integer");
    cfg.threads = j.at("threads").get<int>();
  }

  if (j.contains("bound")) {
    cfg.bound = number_at(j, "bound", "config");
    if (!(cfg.bound > 0.0)) throw ConfigError("config: bound must be > 0");
  }

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

int cmd_simulate(RunConfig cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const IntegratorConfig& ic = cfg.integrator;
  if (!(ic.t_end > 0.0)) throw ConfigError("simulate needs an \"integrator\" block with t_end");

  std::optional<std::uint64_t> used_seed;
  Trajectory traj;
  if (cfg.system == SystemKind::Reduced) {
    const ReducedState s0 = start_state<ReducedState>(
        cfg, cfg.initial_reduced,
        [&](Rng& rng, const SamplerConfig& sc) {
          ReducedState s;
          s.x.resize(static_cast<std::size_t>(cfg.params.N));
          s.p.resize(static_cast<std::size_t>(cfg.params.N));
          for (auto& v : s.x) v = rng.uniform(sc.x_lo, sc.x_hi);
          for (auto& v : s.p) v = rng.uniform(sc.p_lo, sc.p_hi);
          return s;
        },
        used_seed);
    traj = ic.method == Method::OracleRK54
               ? integrate_oracle(cfg.params, s0, ic.t_end, ic.tol)
               : integrate(cfg.params, s0, ic.dt, ic.t_end, ic.method);
  } else {
    const FullState s0 = start_state<FullState>(
        cfg, cfg.initial_full,
        [&](Rng& rng, const SamplerConfig& sc) {
          FullState s;
          s.y.resize(2 * static_cast<std::size_t>(cfg.params.N));
          s.phat.resize(2 * static_cast<std::size_t>(cfg.params.N));
          for (auto& v : s.y) v = rng.uniform(-sc.x_hi, sc.x_hi);
          for (auto& v : s.phat) v = rng.uniform(sc.p_lo, sc.p_hi);
          return s;
        },
        used_seed);
    traj = ic.method == Method::OracleRK54
               ? integrate_oracle(cfg.params, s0, ic.t_end, ic.tol)
               : integrate(cfg.params, s0, ic.dt, ic.t_end, ic.method);
  }

  write_csv(traj, (fs::path(out_dir) / "trajectory.csv").string());

  nlohmann::json meta;
  meta["config"] = cfg.raw;
  meta["params"] = cfg.params;
  meta["system"] = system_kind_name(cfg.system);
  meta["method"] = method_name(ic.method);
  meta["dt"] = traj.dt;  // 0 for the adaptive method: per-row times are authoritative
  if (ic.method == Method::OracleRK54) meta["tol"] = ic.tol;
  meta["t_end"] = ic.t_end;
  meta["samples"] = traj.size();
  if (used_seed)
    meta["seed"] = *used_seed;
  else
    meta["seed"] = nullptr;
  meta["version"] = kVersion;
  write_text(fs::path(out_dir) / "run_meta.json", pretty(meta));
  std::cout << "simulate: " << traj.size() << " samples -> " << out_dir << "/trajectory.csv\n";
  return 0;
}

int cmd_verify(RunConfig cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  SuiteConfig sc;
  sc.flags = cfg.suites;
  sc.bracket_samples = cfg.bracket_samples;
  sc.seed = cfg.seed;

  std::optional<SystemParams> eval_params;
  if (cfg.perturb_k_eval) {
    eval_params = cfg.params;
    eval_params->k[static_cast<std::size_t>(cfg.perturb_k_eval->plane - 1)] +=
        cfg.perturb_k_eval->delta;
  }

  const VerificationReport report =
      run_verification(cfg.params, sc, eval_params ? &*eval_params : nullptr);

  nlohmann::json j = to_json(report);
  j["config"] = cfg.raw;
  j["version"] = kVersion;
  write_text(fs::path(out_dir) / "verify_report.json", pretty(j));

  auto verdict = [](bool ok) { return ok ? "pass" : "FAIL"; };
  if (report.conservation)
    std::cout << "conservation: " << verdict(report.conservation->all_conserved_ok) << "\n";
  if (report.brackets) std::cout << "brackets:     " << verdict(report.brackets->all_pass) << "\n";
  if (report.rank) std::cout << "rank:         " << verdict(report.rank->pass) << "\n";
  if (report.period) std::cout << "period:       " << verdict(report.period->pass) << "\n";
  if (report.reduce_check)
    std::cout << "reduce-check: " << verdict(report.reduce_check->max_dev < kConsistencyTol)
              << "\n";
  std::cout << "verify: " << verdict(report.pass) << " -> " << out_dir << "/verify_report.json\n";

  if (!report.error.empty()) {
    std::cerr << "verify: suite error: " << report.error << "\n";
    return 2;
  }
  return report.pass ? 0 : 1;
}

int cmd_scan(RunConfig cfg, const std::string& out_dir) {
  if (cfg.points.empty())
    throw ConfigError("scan config needs a non-empty \"points\" array of parameter objects");
  fs::create_directories(out_dir);
  SuiteConfig sc;
  sc.flags = cfg.suites;
  sc.bracket_samples = cfg.bracket_samples;
  sc.seed = cfg.seed;

  const std::vector<VerificationReport> reports = survey(cfg.points, sc, cfg.threads);

  std::string lines;
  lines += nlohmann::json{{"config", cfg.raw}, {"version", kVersion}}.dump() + "\n";
  std::size_t passed = 0, errored = 0;
  for (const auto& r : reports) {
    lines += to_json(r).dump() + "\n";
    if (r.pass) ++passed;
    if (!r.error.empty()) ++errored;
  }
  write_text(fs::path(out_dir) / "scan_results.jsonl", lines);

  std::printf("%-6s %-24s %s\n", "point", "params", "verdict");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& P = reports[i].params;
    std::string desc = "N=" + std::to_string(P.N) + " n=[";
    for (std::size_t l = 0; l < P.n.size(); ++l)
      desc += (l ? "," : "") + std::to_string(P.n[l]);
    desc += "]";
    std::printf("%-6zu %-24s %s\n", i, desc.c_str(),
                reports[i].pass ? "pass" : (reports[i].error.empty() ? "FAIL" : "ERROR"));
  }
  std::printf("scan: %zu/%zu passed, %zu errors -> %s/scan_results.jsonl\n", passed,
              reports.size(), errored, out_dir.c_str());
  return passed == reports.size() ? 0 : 1;
}

int cmd_reduce_check(RunConfig cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (cfg.system != SystemKind::Reduced)
    throw ConfigError("reduce-check starts from a reduced state; set \"system\": \"reduced\"");
  const IntegratorConfig& ic = cfg.integrator;
  if (!(ic.t_end > 0.0))
    throw ConfigError("reduce-check needs an \"integrator\" block with t_end");
  if (ic.method == Method::OracleRK54)
    throw ConfigError("reduce-check compares fixed-step legs; use Verlet2 or Yoshida4");

  std::optional<std::uint64_t> used_seed;
  const ReducedState s0 = start_state<ReducedState>(
      cfg, cfg.initial_reduced,
      [&](Rng& rng, const SamplerConfig& scfg) {
        ReducedState s;
        s.x.resize(static_cast<std::size_t>(cfg.params.N));
        s.p.resize(static_cast<std::size_t>(cfg.params.N));
        for (auto& v : s.x) v = rng.uniform(scfg.x_lo, scfg.x_hi);
        for (auto& v : s.p) v = rng.uniform(scfg.p_lo, scfg.p_hi);
        return s;
      },
      used_seed);

  const ConsistencyReport report =
      consistency_check(cfg.params, s0, ic.t_end, ic.dt, ic.method);

  nlohmann::json j = to_json(report);
  j["bound"] = cfg.bound;
  j["pass"] = report.max_dev < cfg.bound;
  j["config"] = cfg.raw;
  j["version"] = kVersion;
  write_text(fs::path(out_dir) / "consistency_report.json", pretty(j));

  std::cout << "reduce-check: max deviation " << report.max_dev << " over t <= "
            << report.t_checked << (report.truncated ? " (truncated at axis)" : "") << " -> "
            << (report.max_dev < cfg.bound ? "pass" : "FAIL") << "\n";
  return report.max_dev < cfg.bound ? 0 : 1;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SingularState*>(&e) || dynamic_cast<const AxisSingularity*>(&e) ||
      dynamic_cast<const StepSizeUnderflow*>(&e) || dynamic_cast<const NegativeK*>(&e) ||
      dynamic_cast<const Overflow*>(&e))
    return 2;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const NonPositiveDimension*>(&e) ||
      dynamic_cast<const NonIntegerMultiplier*>(&e) ||
      dynamic_cast<const NonPositiveOmega*>(&e) || dynamic_cast<const UnknownIntegral*>(&e) ||
      dynamic_cast<const WrongSystemKind*>(&e))
    return 3;
  return 2;  // unexpected runtime failure
}

int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir, std::optional<std::uint64_t> seed_override) {
  try {
    RunConfig cfg = load_config(config_path);
    if (seed_override) {
      cfg.seed = *seed_override;
      // Outputs echo the effective config, override included.
      cfg.raw["seed"] = *seed_override;
      if (cfg.sampler) {
        cfg.sampler->seed = *seed_override;
        cfg.raw["sampler"]["seed"] = *seed_override;
      }
    }
    if (command == "simulate") return cmd_simulate(std::move(cfg), out_dir);
    if (command == "verify") return cmd_verify(std::move(cfg), out_dir);
    if (command == "scan") return cmd_scan(std::move(cfg), out_dir);
    if (command == "reduce-check") return cmd_reduce_check(std::move(cfg), out_dir);
    throw ConfigError("unknown command \"" + command + "\"");
  } catch (const std::exception& e) {
    std::cerr << "anisolab " << command << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace aniso::cli

#pragma once
// Command front end: JSON run configuration, the four subcommands, and the
// exit-code contract (0 pass, 1 verification fail, 2 runtime/singularity,
// 3 usage/config) so scripts can tell science failures from plumbing.
//
// Every output file embeds the exact configuration it was produced from, and
// identical config + seed give byte-identical bytes back.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anisolab/analysis.hpp"

namespace aniso::cli {

struct IntegratorConfig {
  Method method = Method::Yoshida4;
  double dt = 0.0;     // fixed-step size; required unless the method is adaptive
  double t_end = 0.0;  // integration span, > 0
  double tol = 1e-10;  // adaptive accuracy target (OracleRK54 only)
};

struct SamplerConfig {
  std::uint64_t seed = 1;
  double x_lo = 0.3, x_hi = 2.0;  // position range
  double p_lo = -2.0, p_hi = 2.0;
};

// Evaluation-side corruption hook: shifts k_plane by delta in the integral
// EVALUATION only, leaving the dynamics untouched. A correct verifier must
// then report conservation failure.
struct PerturbK {
  int plane = 1;  // 1-based
  double delta = 0.0;
};

struct RunConfig {
  SystemParams params;
  SystemKind system = SystemKind::Reduced;

  // Exactly one of these supplies the start state for commands that
  // integrate a single trajectory (simulate, reduce-check).
  std::optional<FullState> initial_full;
  std::optional<ReducedState> initial_reduced;
  std::optional<SamplerConfig> sampler;

  IntegratorConfig integrator;

  SuiteFlags suites;          // verify
  int bracket_samples = 100;  // verify
  std::uint64_t seed = 1;     // verify / scan / sampler default
  std::optional<PerturbK> perturb_k_eval;

  std::vector<SystemParams> points;  // scan grid
  int threads = 0;                   // scan worker count; 0 = hardware

  double bound = kConsistencyTol;  // reduce-check verdict threshold

  nlohmann::json raw;  // the config exactly as loaded, echoed into outputs
};

// Strict schema: unknown keys are rejected, "params" is required, and
// "initial"/"sampler" are mutually exclusive. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Subcommands. Each writes its artifacts under out_dir (created if missing)
// and returns the process exit code.
int cmd_simulate(RunConfig cfg, const std::string& out_dir);
int cmd_verify(RunConfig cfg, const std::string& out_dir);
int cmd_scan(RunConfig cfg, const std::string& out_dir);
int cmd_reduce_check(RunConfig cfg, const std::string& out_dir);

// Maps the library error taxonomy onto the exit-code contract.
int exit_code_for(const std::exception& e);

// Loads the config, applies the optional seed override, dispatches on the
// command name, and converts exceptions to exit codes + stderr messages.
int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir, std::optional<std::uint64_t> seed_override);

}  // namespace aniso::cli

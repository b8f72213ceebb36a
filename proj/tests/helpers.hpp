#pragma once
// Shared fixtures for the test binaries: parameter builders, tolerant
// comparisons, and a harness that shells out to the command-line tool.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "anisolab/model.hpp"

namespace testutil {

inline aniso::SystemParams make_params(int N, std::vector<int> n, std::vector<double> k,
                                       double omega = 1.0) {
  aniso::SystemParams raw;
  raw.N = N;
  raw.n = std::move(n);
  raw.k = std::move(k);
  raw.omega = omega;
  return aniso::validate_params(raw);
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// |a - b| measured in units of the last place of the larger magnitude.
inline double ulp_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return a == b ? 0.0 : 1e300;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  return std::abs(a - b) / (eps * scale);
}

// ---------------------------------------------------------------------------
// CLI harness. ANISOLAB_CLI_PATH is injected by the build as the absolute
// path of the command-line binary.

struct CliResult {
  int exit_code = -1;
  std::string out_dir;
};

inline std::filesystem::path fresh_dir(const std::string& label) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("anisolab_test_" + std::to_string(::getpid()) + "_" + label + "_" +
                    std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_config(const std::filesystem::path& dir,
                                          const std::string& text) {
  const auto path = dir / "config.json";
  std::ofstream f(path);
  f << text;
  return path;
}

inline CliResult run_cli(const std::string& command, const std::filesystem::path& config,
                         const std::filesystem::path& out_dir, const std::string& extra = "") {
  std::ostringstream cmd;
  cmd << '"' << ANISOLAB_CLI_PATH << "\" " << command << " --config \"" << config.string()
      << "\" --out \"" << out_dir.string() << '"';
  if (!extra.empty()) cmd << ' ' << extra;
  cmd << " > \"" << (out_dir / "stdout.txt").string() << "\" 2> \""
      << (out_dir / "stderr.txt").string() << '"';
  std::filesystem::create_directories(out_dir);
  const int raw = std::system(cmd.str().c_str());
  CliResult r;
  r.exit_code = (raw == -1) ? -1 : WEXITSTATUS(raw);
  r.out_dir = out_dir.string();
  return r;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace testutil

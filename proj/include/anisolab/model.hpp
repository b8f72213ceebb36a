#pragma once
// Value types shared by the whole library: system parameters, phase-space
// states of the full (2N-dimensional) and reduced (N-dimensional) systems,
// the complex representation z_j = phat_j - i*n*omega*y_j, the error
// hierarchy, JSON bindings, and deterministic random sampling.

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace aniso {

inline constexpr const char* kVersion = "0.1.0";

// States with |x_i| below this radius are rejected by every operation that
// evaluates a 1/x^2 term or a polar chart: the forces blow up and integrator
// accuracy is gone well before the arithmetic overflows.
inline constexpr double kExclusionRadius = 1e-8;

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameter validation.
struct NonPositiveDimension : Error {
  explicit NonPositiveDimension(int N)
      : Error("system dimension N must be >= 1, got " + std::to_string(N)) {}
};
struct NonIntegerMultiplier : Error {
  using Error::Error;
};
struct NonPositiveOmega : Error {
  explicit NonPositiveOmega(double omega)
      : Error("base frequency omega must be > 0, got " + std::to_string(omega)) {}
};

// Config / schema problems (CLI maps these to usage errors).
struct ConfigError : Error {
  using Error::Error;
};

// Runtime geometry problems.
struct SingularState : Error {
  double t;
  int index;  // 1-based coordinate index, 0 if not applicable
  SingularState(double t_, int index_)
      : Error("state within exclusion radius of the 1/x^2 singularity at t=" +
              std::to_string(t_) + " (coordinate " + std::to_string(index_) + ")"),
        t(t_),
        index(index_) {}
};
struct AxisSingularity : Error {
  double t;
  int plane;  // 1-based plane index
  AxisSingularity(double t_, int plane_)
      : Error("plane radius within exclusion radius of the axis at t=" +
              std::to_string(t_) + " (plane " + std::to_string(plane_) + ")"),
        t(t_),
        plane(plane_) {}
};
struct StepSizeUnderflow : Error {
  double t;
  explicit StepSizeUnderflow(double t_)
      : Error("adaptive step size underflow at t=" + std::to_string(t_)), t(t_) {}
};
struct NegativeK : Error {
  int index;  // 1-based
  explicit NegativeK(int index_)
      : Error("lift requires k_i >= 0 (angular momentum sqrt(k)); k_" +
              std::to_string(index_) + " is negative"),
        index(index_) {}
};

// Integral bookkeeping.
struct UnknownIntegral : Error {
  using Error::Error;
};
struct WrongSystemKind : Error {
  using Error::Error;
};
struct Overflow : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Parameters and states

enum class SystemKind { Full, Reduced };

inline std::string system_kind_name(SystemKind k) {
  return k == SystemKind::Full ? "full" : "reduced";
}

struct SystemParams {
  int N = 0;                // reduced configuration-space dimension
  std::vector<int> n;       // frequency multipliers, one per plane, n_i >= 1
  std::vector<double> k;    // centrifugal coefficients, any real
  double omega = 0.0;       // base frequency, > 0
};

// Returns a validated copy or throws NonPositiveDimension /
// NonIntegerMultiplier / NonPositiveOmega (ConfigError for length mismatch).
SystemParams validate_params(const SystemParams& raw);

// Multiplier of the plane containing 0-based full-system coordinate j:
// coordinates 2l and 2l+1 share n[l].
inline int plane_multiplier(const SystemParams& params, int j) {
  return params.n[static_cast<std::size_t>(j) / 2];
}

struct FullState {
  std::vector<double> y;     // 2N positions
  std::vector<double> phat;  // 2N momenta
  double t = 0.0;
};

struct ReducedState {
  std::vector<double> x;  // N radial positions
  std::vector<double> p;  // N radial momenta
  double t = 0.0;
};

struct ComplexPhase {
  std::vector<std::complex<double>> z;  // 2N values
};

// z_j = phat_j - i * n(j) * omega * y_j, the planes paired (2l-1, 2l).
ComplexPhase to_complex(const SystemParams& params, const FullState& s);

// Exact inverse: phat_j = Re z_j, y_j = -Im z_j / (n(j) * omega).
FullState to_full(const SystemParams& params, const ComplexPhase& z, double t = 0.0);

// Throws SingularState if any |x_i| < kExclusionRadius where k_i != 0.
void require_off_singularity(const SystemParams& params, const ReducedState& s);

// ---------------------------------------------------------------------------
// JSON bindings. Schema: {"N": int, "n": [int], "k": [float], "omega": float},
// exactly these fields.

void to_json(nlohmann::json& j, const SystemParams& params);
void from_json(const nlohmann::json& j, SystemParams& params);

// ---------------------------------------------------------------------------
// Deterministic sampling. The uniform recipe uses the top 53 bits of the
// mt19937_64 stream directly so outputs are bit-identical across platforms
// (std::uniform_real_distribution is implementation-defined).

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 eng_;
};

// splitmix64 step; derives independent per-point streams from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// x_i uniform in [0.3, 2.0] (keeps 1/x^2 terms tame), p_i uniform in [-2, 2].
ReducedState sample_reduced_state(const SystemParams& params, Rng& rng);

// y, phat uniform in [-2, 2]; planes are resampled until their radius
// exceeds 0.3 so multipolar charts apply.
FullState sample_full_state(const SystemParams& params, Rng& rng);

}  // namespace aniso

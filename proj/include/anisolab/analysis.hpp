#pragma once
// Superintegrability verdicts: conservation drift along trajectories,
// functional-independence rank of the integral set, orbit-closure period
// detection, and the batch survey driver.
//
// All pass thresholds live here as named constants; the verification suites
// and the acceptance gate read them from one place.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anisolab/poisson.hpp"
#include "anisolab/reduction.hpp"

namespace aniso {

inline constexpr double kDriftTol = 1e-6;          // relative drift of conserved integrals
inline constexpr double kDriftEpsAbs = 1e-30;      // guard for integrals vanishing at t=0
inline constexpr double kIdentityTol = 1e-10;      // special-case algebraic identities
inline constexpr double kIModulusTol = 1e-12;      // |F|^2 = 4(E^2 - k n^2 w^2)
inline constexpr double kBracketCrossCheckTol = 1e-10;  // canonical vs z-chart engines
inline constexpr double kClosureTol = 1e-4;        // orbit-closure distance
inline constexpr double kPeriodDivisorTol = 1e-4;  // T* must divide the common period
inline constexpr double kSvdRelThreshold = 1e-8;   // singular value cutoff, relative to max
inline constexpr double kRankVoteFraction = 0.8;   // fraction of sampled states that must agree
inline constexpr int kRankStates = 20;

// max over the trajectory of |F(t) - F(0)| / max(|F(0)|, 1e-30).
double drift_metric(const std::vector<std::complex<double>>& values);

struct DriftEntry {
  IntegralId id;
  double max_rel_drift = 0.0;
  bool conserved_expected = true;  // false for cross-plane L/T with unequal multipliers
};

struct ConservationReport {
  std::vector<DriftEntry> entries;
  bool all_conserved_ok = true;  // every expected-conserved id stayed under kDriftTol
};

ConservationReport conservation_report(const SystemParams& params, const Trajectory& traj,
                                       const std::vector<IntegralId>& ids);

// Rank of the Jacobian of the chosen integrals with respect to the phase
// coordinates, by SVD: count of singular values above rel_threshold times the
// largest. Complex-valued integrals contribute their real and imaginary
// parts as separate rows; Q-type rows use the normalized form to tame scale
// disparities (a nonvanishing smooth rescaling, so the rank is unchanged).
struct RankResult {
  int rank = 0;
  std::vector<double> singular_values;
};
RankResult independence_rank(const SystemParams& params, const std::vector<IntegralId>& ids,
                             const ReducedState& s, double rel_threshold = kSvdRelThreshold);
RankResult independence_rank(const SystemParams& params, const std::vector<IntegralId>& ids,
                             const FullState& s, double rel_threshold = kSvdRelThreshold);

// First T* > 0 where the phase-space distance to the initial sample (momenta
// scaled by 1/omega) dips below tol, refined by a parabola through the three
// samples bracketing the squared-distance minimum. Absent if no dip occurs.
struct PeriodEstimate {
  double T_star = 0.0;
  double closure = 0.0;
};
std::optional<PeriodEstimate> period_estimate(const SystemParams& params, const Trajectory& traj,
                                              double tol);

// The 2N-1 reduced integrals of the superintegrability claim:
// E_1..E_N, R_1..R_{N-1}.
std::vector<IntegralId> reduced_integral_set(const SystemParams& params);
// Full-system counterparts: Eta_1..N and QFull_1..N-1.
std::vector<IntegralId> full_integral_set(const SystemParams& params);

// Observed polynomial degree of an integral in the momenta: log-log slope of
// its magnitude under the dilation p -> lambda p, rounded to the nearest
// integer. Uses unnormalized Q forms (the normalized ones are degree 0).
int momentum_degree_estimate(const SystemParams& params, const IntegralId& id,
                             const ReducedState& s);
int momentum_degree_estimate(const SystemParams& params, const IntegralId& id,
                             const FullState& s);

// ---------------------------------------------------------------------------
// Verification driver
//
// Conservation trajectories start on the turning surface: p = 0 and
// x_i = amp_i * xeq_i with xeq_i = (k_i/n_i^2)^(1/4) (1/sqrt(n_i) where
// k_i = 0). With all momenta zero every Q-factor is real, so the Q-phase
// sits at a critical point and the integrator's secular phase error enters
// the drift only at second order; generic-momentum starts would show a
// first-order artifact at the pinned step size (see the order checks for the
// step-size law). Amplitudes taper toward the fast planes, which carry the
// largest phase error per period.
std::vector<double> turning_amplitudes(int N);
ReducedState radial_turning_state(const SystemParams& params, const std::vector<double>& amps);

struct SuiteFlags {
  bool conservation = true;
  bool brackets = true;
  bool rank = true;
  bool period = true;
  bool reduce_check = false;
};

struct SuiteConfig {
  SuiteFlags flags;
  int bracket_samples = 100;
  std::uint64_t seed = 1;
};

struct RankVerdict {
  int expected = 0;
  int majority_rank = 0;
  double agree_fraction = 0.0;  // fraction of sampled states whose rank == expected
  std::vector<double> example_singular_values;
  bool pass = false;
};

struct PeriodVerdict {
  bool found = false;
  double T_star = 0.0;
  double closure = 0.0;
  double bound = 0.0;   // common radial period the estimate must divide
  int divisor = 0;      // round(bound / T_star)
  bool pass = false;
};

struct VerificationReport {
  SystemParams params;
  std::uint64_t seed = 0;
  std::optional<ConservationReport> conservation;
  std::optional<CommutationReport> brackets;
  std::optional<RankVerdict> rank;
  std::optional<PeriodVerdict> period;
  std::optional<ConsistencyReport> reduce_check;
  std::string error;  // first suite error, empty when clean
  bool pass = false;
};

// Runs the enabled suites at their pinned settings (conservation: Yoshida4,
// dt = 1e-3 * 2pi/omega, 10 base periods; period: dt = 1e-4 * 2pi/omega;
// reduce-check: dt = 2.5e-4 * 2pi/omega over 5 base periods). When
// eval_params is given, integrals are EVALUATED with it while trajectories
// are integrated with `params` — the deliberate-corruption test hook.
VerificationReport run_verification(const SystemParams& params, const SuiteConfig& cfg,
                                    const SystemParams* eval_params = nullptr);

// One report per parameter point, deterministic given cfg.seed (per-point
// streams are split from it); per-point errors are recorded and the survey
// continues. threads <= 0 picks the hardware count.
std::vector<VerificationReport> survey(const std::vector<SystemParams>& points,
                                       const SuiteConfig& cfg, int threads = 0);

nlohmann::json to_json(const VerificationReport& report);

}  // namespace aniso

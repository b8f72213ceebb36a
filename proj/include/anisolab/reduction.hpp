#pragma once
// The per-plane polar (multipolar) change of variables, the level set where
// angular momenta equal sqrt(k_l), the lift and projection between the full
// and reduced systems, and trajectory-level consistency checks.
//
// Plane l of the full system carries coordinates (y_{2l-1}, y_{2l}); its
// polar chart is
//   x_l   = sqrt(y_{2l-1}^2 + y_{2l}^2)          (radius, > 0)
//   phi_l = atan2(y_{2l}, y_{2l-1}) in [0, 2pi)
//   p_l   = (y_{2l-1} phat_{2l-1} + y_{2l} phat_{2l}) / x_l
//   ell_l = y_{2l-1} phat_{2l}    - y_{2l} phat_{2l-1}
// The reduced system is the quotient of the level set ell_l = sqrt(k_l) by
// the per-plane rotations; dropping (phi, ell) from the chart realizes the
// projection concretely.

#include <string>
#include <vector>

#include <json.hpp>

#include "anisolab/dynamics.hpp"
#include "anisolab/model.hpp"

namespace aniso {

struct MultipolarCoords {
  std::vector<double> x;    // radii, strictly positive
  std::vector<double> p;    // radial momenta
  std::vector<double> phi;  // angles in [0, 2pi)
  std::vector<double> ell;  // angular momenta
  double t = 0.0;
};

// Throws AxisSingularity when any plane radius is below the exclusion radius.
MultipolarCoords to_multipolar(const SystemParams& params, const FullState& s);
FullState from_multipolar(const SystemParams& params, const MultipolarCoords& m);

// FullState whose multipolar image has x, p from s, phi = angles, and
// ell_l = sqrt(k_l). Throws NegativeK when any k_l < 0.
FullState lift(const SystemParams& params, const ReducedState& s,
               const std::vector<double>& angles);

// Pointwise projection of a full trajectory: multipolar radii and radial
// momenta, angles dropped, times carried over. AxisSingularity reports the
// failing sample's time.
Trajectory reduce_trajectory(const SystemParams& params, const Trajectory& traj);

inline constexpr double kConsistencyTol = 1e-6;

struct ConsistencyReport {
  double max_dev = 0.0;
  double t_of_max = 0.0;
  double dt = 0.0;
  Method method = Method::Yoshida4;
  double t_checked = 0.0;  // end of the compared window
  bool truncated = false;  // true when a zero-k plane crossed the axis first
};

// Integrates the reduced system from s0 and the full system from
// lift(s0, zero angles) with the same fixed step, projects the latter, and
// reports the max componentwise deviation between the two reduced
// trajectories. Zero-k planes oscillate through the axis, where the polar
// chart ends — the comparison then stops at the first crossing rather than
// continuing through the singularity.
ConsistencyReport consistency_check(const SystemParams& params, const ReducedState& s0,
                                    double t_end, double dt, Method method = Method::Yoshida4);

// {"max_dev", "t_of_max", "dt", "method"} (+ "truncated_at" if the window
// was cut short at an axis crossing).
nlohmann::json to_json(const ConsistencyReport& report);

}  // namespace aniso

#include "anisolab/reduction.hpp"

#include <cmath>
#include <numbers>

namespace aniso {

MultipolarCoords to_multipolar(const SystemParams& params, const FullState& s) {
  const auto N = static_cast<std::size_t>(params.N);
  MultipolarCoords m;
  m.x.resize(N);
  m.p.resize(N);
  m.phi.resize(N);
  m.ell.resize(N);
  m.t = s.t;
  for (std::size_t l = 0; l < N; ++l) {
    const double y1 = s.y[2 * l], y2 = s.y[2 * l + 1];
    const double p1 = s.phat[2 * l], p2 = s.phat[2 * l + 1];
    const double r = std::hypot(y1, y2);
    if (r < kExclusionRadius) throw AxisSingularity(s.t, static_cast<int>(l) + 1);
    double phi = std::atan2(y2, y1);
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    m.x[l] = r;
    m.phi[l] = phi;
    m.p[l] = (y1 * p1 + y2 * p2) / r;
    m.ell[l] = y1 * p2 - y2 * p1;
  }
  return m;
}

FullState from_multipolar(const SystemParams& params, const MultipolarCoords& m) {
  const auto N = static_cast<std::size_t>(params.N);
  FullState s;
  s.y.resize(2 * N);
  s.phat.resize(2 * N);
  s.t = m.t;
  for (std::size_t l = 0; l < N; ++l) {
    const double c = std::cos(m.phi[l]), sn = std::sin(m.phi[l]);
    s.y[2 * l] = m.x[l] * c;
    s.y[2 * l + 1] = m.x[l] * sn;
    s.phat[2 * l] = m.p[l] * c - m.ell[l] * sn / m.x[l];
    s.phat[2 * l + 1] = m.p[l] * sn + m.ell[l] * c / m.x[l];
  }
  return s;
}

FullState lift(const SystemParams& params, const ReducedState& s,
               const std::vector<double>& angles) {
  const auto N = static_cast<std::size_t>(params.N);
  for (std::size_t l = 0; l < N; ++l)
    if (params.k[l] < 0.0) throw NegativeK(static_cast<int>(l) + 1);
  require_off_singularity(params, s);
  MultipolarCoords m;
  m.x = s.x;
  m.p = s.p;
  m.t = s.t;
  m.phi.resize(N);
  m.ell.resize(N);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t l = 0; l < N; ++l) {
    double a = std::fmod(angles[l], two_pi);
    if (a < 0.0) a += two_pi;
    m.phi[l] = a;
    m.ell[l] = std::sqrt(params.k[l]);
    if (m.x[l] < kExclusionRadius) throw AxisSingularity(s.t, static_cast<int>(l) + 1);
  }
  return from_multipolar(params, m);
}

Trajectory reduce_trajectory(const SystemParams& params, const Trajectory& traj) {
  if (traj.kind != SystemKind::Full)
    throw WrongSystemKind("reduce_trajectory needs a full-system trajectory");
  Trajectory out;
  out.kind = SystemKind::Reduced;
  out.method = traj.method;
  out.dt = traj.dt;
  out.t.reserve(traj.size());
  out.q.reserve(traj.size());
  out.p.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    MultipolarCoords m = to_multipolar(params, traj.full_at(i));  // throws with sample time
    out.t.push_back(traj.t[i]);
    out.q.push_back(std::move(m.x));
    out.p.push_back(std::move(m.p));
  }
  return out;
}

ConsistencyReport consistency_check(const SystemParams& params, const ReducedState& s0,
                                    double t_end, double dt, Method method) {
  const Trajectory reduced_leg = integrate(params, s0, dt, t_end, method);
  const FullState lifted = lift(params, s0, std::vector<double>(static_cast<std::size_t>(params.N), 0.0));
  const Trajectory full_leg = integrate(params, lifted, dt, t_end, method);

  ConsistencyReport report;
  report.dt = dt;
  report.method = method;
  const std::size_t count = std::min(reduced_leg.size(), full_leg.size());
  for (std::size_t i = 0; i < count; ++i) {
    // The radial chart covers x_l > 0 only. A plane with k_l = 0 has no
    // centrifugal barrier, so the reduced leg can run through the axis
    // between samples; from there it tracks the signed line motion while the
    // projection of the full leg folds onto x >= 0. Comparison stops at the
    // first sample outside the chart.
    bool left_chart = false;
    for (double xl : reduced_leg.q[i])
      if (xl < kExclusionRadius) left_chart = true;
    MultipolarCoords m;
    if (!left_chart) {
      try {
        m = to_multipolar(params, full_leg.full_at(i));
      } catch (const AxisSingularity&) {
        left_chart = true;
      }
    }
    if (left_chart) {
      report.truncated = true;
      break;
    }
    for (std::size_t l = 0; l < m.x.size(); ++l) {
      const double dev =
          std::max(std::abs(m.x[l] - reduced_leg.q[i][l]), std::abs(m.p[l] - reduced_leg.p[i][l]));
      if (dev > report.max_dev) {
        report.max_dev = dev;
        report.t_of_max = reduced_leg.t[i];
      }
    }
    report.t_checked = reduced_leg.t[i];
  }
  return report;
}

nlohmann::json to_json(const ConsistencyReport& report) {
  nlohmann::json j{{"max_dev", report.max_dev},
                   {"t_of_max", report.t_of_max},
                   {"dt", report.dt},
                   {"method", method_name(report.method)}};
  if (report.truncated) j["truncated_at"] = report.t_checked;
  return j;
}

}  // namespace aniso

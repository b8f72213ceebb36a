#include "anisolab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace aniso {
namespace {

// Yoshida's fourth-order triple jump: Verlet substeps of sizes w1*h, w0*h,
// w1*h with w1 = 1/(2 - 2^(1/3)), w0 = 1 - 2*w1 (the middle one runs
// backwards in time).
const double kYoshidaW1 = 1.0 / (2.0 - std::cbrt(2.0));
const double kYoshidaW0 = 1.0 - 2.0 * kYoshidaW1;

// Internal representation: flat (q, p) arrays plus a force callback, shared
// by both system kinds and both fixed-step methods.
struct Phase {
  std::vector<double> q, p;
  double t = 0.0;
};

void force_full_into(const SystemParams& params, const std::vector<double>& y,
                     std::vector<double>& f) {
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double nw = plane_multiplier(params, static_cast<int>(j)) * params.omega;
    f[j] = -nw * nw * y[j];
  }
}

void force_reduced_into(const SystemParams& params, const std::vector<double>& x, double t,
                        std::vector<double>& f) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double nw = params.n[i] * params.omega;
    if (params.k[i] != 0.0) {
      if (std::abs(x[i]) < kExclusionRadius) throw SingularState(t, static_cast<int>(i) + 1);
      f[i] = params.k[i] / (x[i] * x[i] * x[i]) - nw * nw * x[i];
    } else {
      f[i] = -nw * nw * x[i];
    }
  }
}

void eval_force(const SystemParams& params, SystemKind kind, const std::vector<double>& q,
                double t, std::vector<double>& f) {
  if (kind == SystemKind::Full)
    force_full_into(params, q, f);
  else
    force_reduced_into(params, q, t, f);
}

// Position Verlet: drift h/2, kick h, drift h/2. The kick's force evaluation
// carries the singularity guard; h may be negative (Yoshida's middle leg).
void verlet_substep(const SystemParams& params, SystemKind kind, Phase& s, double h,
                    std::vector<double>& f) {
  for (std::size_t i = 0; i < s.q.size(); ++i) s.q[i] += 0.5 * h * s.p[i];
  eval_force(params, kind, s.q, s.t, f);
  for (std::size_t i = 0; i < s.q.size(); ++i) s.p[i] += h * f[i];
  for (std::size_t i = 0; i < s.q.size(); ++i) s.q[i] += 0.5 * h * s.p[i];
}

void step_inplace(const SystemParams& params, SystemKind kind, Phase& s, double dt,
                  Method method, std::vector<double>& f) {
  switch (method) {
    case Method::Verlet2:
      verlet_substep(params, kind, s, dt, f);
      break;
    case Method::Yoshida4:
      verlet_substep(params, kind, s, kYoshidaW1 * dt, f);
      verlet_substep(params, kind, s, kYoshidaW0 * dt, f);
      verlet_substep(params, kind, s, kYoshidaW1 * dt, f);
      break;
    case Method::OracleRK54:
      throw ConfigError("fixed-step integration supports Verlet2 and Yoshida4 only");
  }
}

Trajectory integrate_impl(const SystemParams& params, SystemKind kind,
                          const std::vector<double>& q0, const std::vector<double>& p0,
                          double t0, double dt, double t_end, Method method) {
  if (!(dt > 0.0)) throw ConfigError("integrate requires dt > 0");
  if (!(t_end > t0)) throw ConfigError("integrate requires t_end > start time");
  const auto steps = static_cast<long long>(std::llround((t_end - t0) / dt));
  const long long nsteps = std::max(1ll, steps);

  Trajectory traj;
  traj.kind = kind;
  traj.method = method;
  traj.dt = dt;
  traj.t.reserve(static_cast<std::size_t>(nsteps) + 1);
  traj.q.reserve(static_cast<std::size_t>(nsteps) + 1);
  traj.p.reserve(static_cast<std::size_t>(nsteps) + 1);

  Phase s{q0, p0, t0};
  std::vector<double> f(q0.size());
  traj.t.push_back(t0);
  traj.q.push_back(s.q);
  traj.p.push_back(s.p);
  for (long long i = 1; i <= nsteps; ++i) {
    s.t = t0 + static_cast<double>(i - 1) * dt;  // time entering the step, for error reports
    step_inplace(params, kind, s, dt, method, f);
    s.t = t0 + static_cast<double>(i) * dt;
    traj.t.push_back(s.t);
    traj.q.push_back(s.q);
    traj.p.push_back(s.p);
  }
  return traj;
}

// Dormand–Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
// Difference between the 5th- and embedded 4th-order weights.
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

// `tol` is the whole-run accuracy target; the per-step controller aims two
// orders tighter so accumulated error over ~10^3..10^5 steps stays within it.
constexpr double kOracleSafety = 1e-2;

struct Rhs {
  const SystemParams& params;
  SystemKind kind;

  // dy/dt for the first-order system (q' = p, p' = force(q)).
  void operator()(const std::vector<double>& q, const std::vector<double>& p, double t,
                  std::vector<double>& dq, std::vector<double>& dp) const {
    dq = p;
    eval_force(params, kind, q, t, dp);
  }
};

Trajectory oracle_impl(const SystemParams& params, SystemKind kind,
                       const std::vector<double>& q0, const std::vector<double>& p0, double t0,
                       double t_end, double tol) {
  if (!(tol > 0.0)) throw ConfigError("integrate_oracle requires tol > 0");
  if (!(t_end > t0)) throw ConfigError("integrate_oracle requires t_end > start time");

  const std::size_t D = q0.size();
  const double span = t_end - t0;
  const double eps = tol * kOracleSafety;
  const double h_min = 1e-14 * std::max(span, 1.0);

  int n_max = 1;
  for (int ni : params.n) n_max = std::max(n_max, ni);
  double h = std::min(span, 1e-2 * (2.0 * std::numbers::pi / params.omega) / n_max);

  Rhs rhs{params, kind};
  Trajectory traj;
  traj.kind = kind;
  traj.method = Method::OracleRK54;
  traj.dt = 0.0;

  std::vector<double> q = q0, p = p0;
  double t = t0;
  traj.t.push_back(t);
  traj.q.push_back(q);
  traj.p.push_back(p);

  // Stage storage: positions and momenta interleaved as two arrays per stage.
  std::vector<std::vector<double>> kq(7, std::vector<double>(D)), kp(7, std::vector<double>(D));
  std::vector<double> qs(D), ps(D), q5(D), p5(D);

  auto stage_state = [&](const std::vector<double>& coef, int nstages) {
    for (std::size_t i = 0; i < D; ++i) {
      double aq = 0.0, ap = 0.0;
      for (int s = 0; s < nstages; ++s) {
        aq += coef[static_cast<std::size_t>(s)] * kq[static_cast<std::size_t>(s)][i];
        ap += coef[static_cast<std::size_t>(s)] * kp[static_cast<std::size_t>(s)][i];
      }
      qs[i] = q[i] + h * aq;
      ps[i] = p[i] + h * ap;
    }
  };

  bool have_k1 = false;
  while (t < t_end - 1e-12 * span) {
    h = std::min(h, t_end - t);
    bool accepted = false;
    try {
      if (!have_k1) {
        rhs(q, p, t, kq[0], kp[0]);
        have_k1 = true;
      }
      stage_state({kA21}, 1);
      rhs(qs, ps, t + h / 5, kq[1], kp[1]);
      stage_state({kA31, kA32}, 2);
      rhs(qs, ps, t + 3 * h / 10, kq[2], kp[2]);
      stage_state({kA41, kA42, kA43}, 3);
      rhs(qs, ps, t + 4 * h / 5, kq[3], kp[3]);
      stage_state({kA51, kA52, kA53, kA54}, 4);
      rhs(qs, ps, t + 8 * h / 9, kq[4], kp[4]);
      stage_state({kA61, kA62, kA63, kA64, kA65}, 5);
      rhs(qs, ps, t + h, kq[5], kp[5]);
      // 5th-order solution (and 7th stage at the same point, FSAL).
      for (std::size_t i = 0; i < D; ++i) {
        q5[i] = q[i] + h * (kB1 * kq[0][i] + kB3 * kq[2][i] + kB4 * kq[3][i] +
                            kB5 * kq[4][i] + kB6 * kq[5][i]);
        p5[i] = p[i] + h * (kB1 * kp[0][i] + kB3 * kp[2][i] + kB4 * kp[3][i] +
                            kB5 * kp[4][i] + kB6 * kp[5][i]);
      }
      rhs(q5, p5, t + h, kq[6], kp[6]);

      double err2 = 0.0;
      for (std::size_t i = 0; i < D; ++i) {
        const double eq = h * (kE1 * kq[0][i] + kE3 * kq[2][i] + kE4 * kq[3][i] +
                               kE5 * kq[4][i] + kE6 * kq[5][i] + kE7 * kq[6][i]);
        const double ep = h * (kE1 * kp[0][i] + kE3 * kp[2][i] + kE4 * kp[3][i] +
                               kE5 * kp[4][i] + kE6 * kp[5][i] + kE7 * kp[6][i]);
        const double sq = eps * (1.0 + std::max(std::abs(q[i]), std::abs(q5[i])));
        const double sp = eps * (1.0 + std::max(std::abs(p[i]), std::abs(p5[i])));
        err2 += (eq / sq) * (eq / sq) + (ep / sp) * (ep / sp);
      }
      const double err = std::sqrt(err2 / static_cast<double>(2 * D));

      if (err <= 1.0) {
        t += h;
        q = q5;
        p = p5;
        kq[0] = kq[6];  // FSAL
        kp[0] = kp[6];
        traj.t.push_back(t);
        traj.q.push_back(q);
        traj.p.push_back(p);
        accepted = true;
        const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(grow, 0.2, 5.0);
      } else {
        h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
      }
    } catch (const SingularState&) {
      // A stage probed the exclusion region: treat as a rejected step.
      h *= 0.5;
      have_k1 = false;
    }
    if (!accepted && h < h_min) throw StepSizeUnderflow(t);
  }
  return traj;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Verlet2: return "Verlet2";
    case Method::Yoshida4: return "Yoshida4";
    case Method::OracleRK54: return "OracleRK54";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "Verlet2") return Method::Verlet2;
  if (name == "Yoshida4") return Method::Yoshida4;
  if (name == "OracleRK54") return Method::OracleRK54;
  throw ConfigError("unknown integration method \"" + name +
                    "\" (expected Verlet2, Yoshida4, or OracleRK54)");
}

FullState Trajectory::full_at(std::size_t i) const {
  if (kind != SystemKind::Full)
    throw WrongSystemKind("trajectory holds reduced states, full state requested");
  return FullState{q[i], p[i], t[i]};
}

ReducedState Trajectory::reduced_at(std::size_t i) const {
  if (kind != SystemKind::Reduced)
    throw WrongSystemKind("trajectory holds full states, reduced state requested");
  return ReducedState{q[i], p[i], t[i]};
}

double hamiltonian_full(const SystemParams& params, const FullState& s) {
  return hamiltonian_full_t<double>(params, s.y, s.phat);
}

double hamiltonian_reduced(const SystemParams& params, const ReducedState& s) {
  require_off_singularity(params, s);
  return hamiltonian_reduced_t<double>(params, s.x, s.p);
}

std::vector<double> force_full(const SystemParams& params, const FullState& s) {
  std::vector<double> f(s.y.size());
  force_full_into(params, s.y, f);
  return f;
}

std::vector<double> force_reduced(const SystemParams& params, const ReducedState& s) {
  std::vector<double> f(s.x.size());
  force_reduced_into(params, s.x, s.t, f);
  return f;
}

FullState step(const SystemParams& params, const FullState& s, double dt, Method method) {
  Phase ph{s.y, s.phat, s.t};
  std::vector<double> f(s.y.size());
  step_inplace(params, SystemKind::Full, ph, dt, method, f);
  return FullState{std::move(ph.q), std::move(ph.p), s.t + dt};
}

ReducedState step(const SystemParams& params, const ReducedState& s, double dt, Method method) {
  Phase ph{s.x, s.p, s.t};
  std::vector<double> f(s.x.size());
  step_inplace(params, SystemKind::Reduced, ph, dt, method, f);
  return ReducedState{std::move(ph.q), std::move(ph.p), s.t + dt};
}

Trajectory integrate(const SystemParams& params, const FullState& s, double dt, double t_end,
                     Method method) {
  return integrate_impl(params, SystemKind::Full, s.y, s.phat, s.t, dt, t_end, method);
}

Trajectory integrate(const SystemParams& params, const ReducedState& s, double dt, double t_end,
                     Method method) {
  return integrate_impl(params, SystemKind::Reduced, s.x, s.p, s.t, dt, t_end, method);
}

Trajectory integrate_oracle(const SystemParams& params, const FullState& s, double t_end,
                            double tol) {
  return oracle_impl(params, SystemKind::Full, s.y, s.phat, s.t, t_end, tol);
}

Trajectory integrate_oracle(const SystemParams& params, const ReducedState& s, double t_end,
                            double tol) {
  return oracle_impl(params, SystemKind::Reduced, s.x, s.p, s.t, t_end, tol);
}

void write_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  const std::size_t D = traj.q.empty() ? 0 : traj.q.front().size();
  out << "t";
  for (std::size_t i = 1; i <= D; ++i) out << ",x" << i;
  for (std::size_t i = 1; i <= D; ++i) out << ",p" << i;
  out << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (std::size_t s = 0; s < traj.size(); ++s) {
    put(traj.t[s]);
    for (std::size_t i = 0; i < D; ++i) {
      out << ',';
      put(traj.q[s][i]);
    }
    for (std::size_t i = 0; i < D; ++i) {
      out << ',';
      put(traj.p[s][i]);
    }
    out << "\n";
  }
}

}  // namespace aniso

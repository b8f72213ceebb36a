#pragma once
// Hamiltonians, analytic forces, and time integration for both systems.
//
// Full system (2N coordinates, planes paired (2l-1, 2l)):
//   H = 1/2 sum p̂_j^2 + omega^2/2 sum_l n_l^2 (y_{2l-1}^2 + y_{2l}^2)
// Reduced system (N coordinates):
//   H = 1/2 sum p_i^2 + 1/2 sum k_i / x_i^2 + omega^2/2 sum n_i^2 x_i^2
//
// Both are separable kinetic-plus-potential, so the production integrators
// are splitting methods (position Verlet and its fourth-order Yoshida
// composition). The cross-check oracle is an adaptive embedded RK5(4) — a
// different method family with independent error statistics.

#include <string>
#include <vector>

#include "anisolab/dual.hpp"
#include "anisolab/model.hpp"

namespace aniso {

enum class Method { Verlet2, Yoshida4, OracleRK54 };

std::string method_name(Method m);
Method parse_method(const std::string& name);  // throws ConfigError

struct Trajectory {
  SystemKind kind = SystemKind::Reduced;
  Method method = Method::Yoshida4;
  double dt = 0.0;  // fixed step size; 0 for the adaptive oracle (times authoritative)
  std::vector<double> t;
  std::vector<std::vector<double>> q;  // positions per sample (2N or N values)
  std::vector<std::vector<double>> p;  // momenta per sample

  std::size_t size() const { return t.size(); }
  FullState full_at(std::size_t i) const;        // WrongSystemKind unless kind == Full
  ReducedState reduced_at(std::size_t i) const;  // WrongSystemKind unless kind == Reduced
};

// Templated over the scalar so the bracket engine can evaluate Hamiltonians
// on dual coordinates.
template <class S>
S hamiltonian_full_t(const SystemParams& params, const std::vector<S>& y,
                     const std::vector<S>& phat) {
  S kin(0.0), pot(0.0);
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double nw = plane_multiplier(params, static_cast<int>(j)) * params.omega;
    kin += phat[j] * phat[j];
    pot += S(nw * nw) * y[j] * y[j];
  }
  return S(0.5) * (kin + pot);
}

template <class S>
S hamiltonian_reduced_t(const SystemParams& params, const std::vector<S>& x,
                        const std::vector<S>& p) {
  S h(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double nw = params.n[i] * params.omega;
    h += S(0.5) * p[i] * p[i] + S(0.5 * nw * nw) * x[i] * x[i];
    if (params.k[i] != 0.0) h += S(0.5 * params.k[i]) / (x[i] * x[i]);
  }
  return h;
}

double hamiltonian_full(const SystemParams& params, const FullState& s);
// Throws SingularState if any |x_i| < kExclusionRadius with k_i != 0.
double hamiltonian_reduced(const SystemParams& params, const ReducedState& s);

// -dH/dy: component j is -omega^2 n(j)^2 y_j.
std::vector<double> force_full(const SystemParams& params, const FullState& s);
// -dH/dx: component i is k_i/x_i^3 - omega^2 n_i^2 x_i. Same singularity guard.
std::vector<double> force_reduced(const SystemParams& params, const ReducedState& s);

// One symplectic step (Verlet2 or Yoshida4 only). A step that would enter the
// exclusion region throws SingularState and leaves the caller's state intact.
FullState step(const SystemParams& params, const FullState& s, double dt, Method method);
ReducedState step(const SystemParams& params, const ReducedState& s, double dt, Method method);

// Fixed-step trajectory from s; samples every step including the initial
// state; the final time lands within dt of t_end.
Trajectory integrate(const SystemParams& params, const FullState& s, double dt, double t_end,
                     Method method);
Trajectory integrate(const SystemParams& params, const ReducedState& s, double dt, double t_end,
                     Method method);

// Adaptive embedded RK5(4) cross-check integrator. `tol` is the accuracy
// target for the whole run: the internal per-step controller aims two orders
// tighter so that conserved-quantity drift stays below ~10x tol even after
// error accumulates over many steps. Throws StepSizeUnderflow near
// singularities.
Trajectory integrate_oracle(const SystemParams& params, const FullState& s, double t_end,
                            double tol);
Trajectory integrate_oracle(const SystemParams& params, const ReducedState& s, double t_end,
                            double tol);

// CSV export: header t,x1..xD,p1..pD (D = N or 2N), 17-significant-digit
// decimal floats.
void write_csv(const Trajectory& traj, const std::string& path);

}  // namespace aniso

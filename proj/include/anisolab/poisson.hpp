#pragma once
// Exact-derivative Poisson brackets.
//
// Two engines over the same dual-number core:
//  * bracket_canonical — sum_i (df/dq_i dg/dp_i - df/dp_i dg/dq_i) on either
//    system's phase coordinates.
//  * bracket_z — the weighted bracket on the complex chart,
//    -2 i omega sum_k n_k sum_{j in plane k} (f_{z_j} g_{zbar_j} - f_{zbar_j} g_{z_j}),
//    with Wirtinger derivatives assembled from dual passes over Re z_j and
//    Im z_j. Pulling a z-space function back through the chart makes the two
//    engines agree — a consistency check the test suite pins at 1e-10.
//
// Residuals of conserved pairs are reported scaled by gradient norms:
// |{F,G}| / (||grad F|| ||grad G|| + 1e-30); raw magnitudes vary over many
// orders with the multipliers.

#include <cstdint>
#include <functional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "anisolab/invariants.hpp"

namespace aniso {

// A phase-space function evaluable on double and on Dual coordinates. Wrap
// any generic callable (params, positions, momenta) -> scalar or CVal.
class PhaseFunction {
 public:
  template <class F>
  PhaseFunction(SystemKind kind, std::string name, F f)
      : kind_(kind),
        name_(std::move(name)),
        fd_([f](const SystemParams& P, const std::vector<double>& q,
                const std::vector<double>& p) -> CVal<double> { return f(P, q, p); }),
        fdual_([f](const SystemParams& P, const std::vector<Dual>& q,
                   const std::vector<Dual>& p) -> CVal<Dual> { return f(P, q, p); }) {}

  CVal<double> eval(const SystemParams& params, const std::vector<double>& q,
                    const std::vector<double>& p) const {
    return fd_(params, q, p);
  }
  CVal<Dual> eval_dual(const SystemParams& params, const std::vector<Dual>& q,
                       const std::vector<Dual>& p) const {
    return fdual_(params, q, p);
  }

  SystemKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  SystemKind kind_;
  std::string name_;
  std::function<CVal<double>(const SystemParams&, const std::vector<double>&,
                             const std::vector<double>&)>
      fd_;
  std::function<CVal<Dual>(const SystemParams&, const std::vector<Dual>&,
                           const std::vector<Dual>&)>
      fdual_;
};

// The named integral as a PhaseFunction. Q-type integrals evaluate in
// normalized form when normalized_q is set (the suite default).
PhaseFunction integral_function(const SystemParams& params, const IntegralId& id,
                                bool normalized_q = true);

// Coordinate probes: q_i or p_i (0-based index).
PhaseFunction coordinate_function(SystemKind kind, int index, bool momentum);

// Pointwise product f*g, for the Leibniz property.
PhaseFunction product(const PhaseFunction& f, const PhaseFunction& g);

// A function of (z, zbar), evaluable on CVal<double> and CVal<Dual> vectors.
class ZFunction {
 public:
  template <class F>
  ZFunction(std::string name, F f)
      : name_(std::move(name)),
        fd_([f](const SystemParams& P, const std::vector<CVal<double>>& z) -> CVal<double> {
          return f(P, z);
        }),
        fdual_([f](const SystemParams& P, const std::vector<CVal<Dual>>& z) -> CVal<Dual> {
          return f(P, z);
        }) {}

  CVal<double> eval(const SystemParams& params, const std::vector<CVal<double>>& z) const {
    return fd_(params, z);
  }
  CVal<Dual> eval_dual(const SystemParams& params, const std::vector<CVal<Dual>>& z) const {
    return fdual_(params, z);
  }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::function<CVal<double>(const SystemParams&, const std::vector<CVal<double>>&)> fd_;
  std::function<CVal<Dual>(const SystemParams&, const std::vector<CVal<Dual>>&)> fdual_;
};

// z-space form of a full-system integral (C, L, T, Xi, XiBar, Eta, EFull,
// QFull, QBarFull, HFull).
ZFunction z_integral_function(const SystemParams& params, const IntegralId& id,
                              bool normalized_q = true);

// Composes a z-space function with the chart z(y, phat), giving the matching
// canonical-coordinate function.
PhaseFunction pullback(const ZFunction& zf);

// Value and first derivatives at a point, derivatives exact to rounding.
struct Gradient {
  CVal<double> value;
  std::vector<CVal<double>> dq, dp;
  double norm() const;  // Frobenius norm of all derivative components
};
Gradient gradient(const SystemParams& params, const PhaseFunction& f,
                  const std::vector<double>& q, const std::vector<double>& p);

struct BracketValue {
  std::complex<double> value;
  double grad_f_norm = 0.0;
  double grad_g_norm = 0.0;
  double scaled() const { return std::abs(value) / (grad_f_norm * grad_g_norm + 1e-30); }
};

BracketValue bracket_canonical(const SystemParams& params, const PhaseFunction& f,
                               const PhaseFunction& g, const std::vector<double>& q,
                               const std::vector<double>& p);
BracketValue bracket_canonical(const SystemParams& params, const PhaseFunction& f,
                               const PhaseFunction& g, const FullState& s);
BracketValue bracket_canonical(const SystemParams& params, const PhaseFunction& f,
                               const PhaseFunction& g, const ReducedState& s);

// Wirtinger derivatives of one z-space function at z: (df/dz_j, df/dzbar_j).
struct ZGradient {
  CVal<double> value;
  std::vector<std::complex<double>> dz, dzbar;
};
ZGradient z_gradient(const SystemParams& params, const ZFunction& f, const ComplexPhase& z);

std::complex<double> bracket_z(const SystemParams& params, const ZFunction& f,
                               const ZFunction& g, const ComplexPhase& z);

// Per-plane rotation generator residual (the first-order operator
// z_b d_{z_a} - z_a d_{z_b} + conjugate terms applied to f), scaled by the
// gradient magnitude. Zero for SO(2)-invariant functions.
double rotation_generator_residual(const SystemParams& params, const ZFunction& f,
                                   const ComplexPhase& z, int plane);

// ---------------------------------------------------------------------------
// Commutation reports

inline constexpr double kBracketTol = 1e-9;

struct PairResult {
  IntegralId a, b;
  double max_scaled_residual = 0.0;
  bool pass = false;
};

struct CommutationReport {
  std::vector<PairResult> pairs;
  std::uint64_t seed = 0;
  int samples = 0;
  bool all_pass = true;
};

// Max scaled residual over `samples` random bounded states per pair
// (positions in [0.3, 2.0], momenta in [-2, 2], full-system states sampled
// off-axis); pass means < 1e-9.
CommutationReport commutation_report(const SystemParams& params, SystemKind kind,
                                     const std::vector<std::pair<IntegralId, IntegralId>>& pairs,
                                     int samples, std::uint64_t seed);

nlohmann::json to_json(const CommutationReport& report);

}  // namespace aniso

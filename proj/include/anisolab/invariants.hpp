#pragma once
// Conserved quantities of both systems, in overflow-safe form.
//
// Full system, complex representation z_j = phat_j - i n(j) omega y_j with
// planes paired (2l-1, 2l):
//   c_jk  = z_j^n(k) * conj(z_k)^n(j)        (n(j) = multiplier of j's plane)
//   L_ik  = y_i phat_k - y_k phat_i          (conserved when n(i) = n(k))
//   T_ik  = phat_i phat_k + n(i) n(k) omega^2 y_i y_k   (same condition)
//   xi_l  = z_{2l-1}^2 + z_{2l}^2
//   eta_l = |z_{2l-1}|^2 + |z_{2l}|^2 = 2 E_l
//   QFull_l = xi_l^{n_N} * conj(xi_N)^{n_l}
//
// Reduced system:
//   E_l = p_l^2/2 + k_l/(2 x_l^2) + n_l^2 omega^2 x_l^2 / 2
//   F_l = p_l^2 + k_l/x_l^2 - n_l^2 omega^2 x_l^2 - 2 i n_l omega p_l x_l
//   Q_l = F_l^{n_N} * conj(F_N)^{n_l},  R_l = Re Q_l,  I_l = |F_l|^2
//
// |F_l| = 2 sqrt(E_l^2 - k_l n_l^2 omega^2) <= 2 E_l for k_l >= 0, so the
// normalized form Q_l / ((2 E_l)^{n_N} (2 E_N)^{n_l}) has modulus <= 1 and is
// the default in verification suites; the unnormalized form guards against
// exponent overflow and reports it.
//
// Every evaluator is templated over the scalar so the Poisson-bracket engine
// can run it on dual numbers.

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "anisolab/dual.hpp"
#include "anisolab/dynamics.hpp"
#include "anisolab/model.hpp"

namespace aniso {

// ---------------------------------------------------------------------------
// Integral identifiers

enum class Tag {
  C,            // c_jk, two coordinate indices
  L,            // angular momentum, two coordinate indices
  T,            // tensor invariant, two coordinate indices
  Xi,           // xi_l, plane index
  XiBar,        // conj(xi_l)
  Eta,          // eta_l
  EFull,        // eta_l / 2
  QFull,        // plane-l vs plane-N product, l in 1..N-1
  QBarFull,     //
  EReduced,     // E_l
  QReduced,     // Q_l, l in 1..N-1
  QBarReduced,  //
  R,            // Re Q_l
  IMod,         // |F_l|^2
  HFull,
  HReduced,
};

struct IntegralId {
  Tag tag;
  int i = 0;  // first (or only) 1-based index
  int j = 0;  // second 1-based index for C/L/T

  friend bool operator==(const IntegralId&, const IntegralId&) = default;
};

std::string to_string(const IntegralId& id);           // e.g. "C(1,2)", "R(2)", "HReduced"
IntegralId parse_integral_id(const std::string& txt);  // throws UnknownIntegral

// Which system the integral is a function on.
SystemKind id_kind(const IntegralId& id);

// Index-range and kind check; throws UnknownIntegral / WrongSystemKind.
void validate_id(const SystemParams& params, SystemKind kind, const IntegralId& id);

// All listed ids are constant along the matching flow except cross-plane L/T
// with unequal multipliers.
bool is_conserved(const SystemParams& params, const IntegralId& id);

// ---------------------------------------------------------------------------
// Templated evaluators, full system

template <class S>
CVal<S> z_of(const SystemParams& params, const std::vector<S>& y, const std::vector<S>& phat,
             int j0) {  // 0-based coordinate
  const double nw = plane_multiplier(params, j0) * params.omega;
  return {phat[static_cast<std::size_t>(j0)], S(-nw) * y[static_cast<std::size_t>(j0)]};
}

template <class S>
std::vector<CVal<S>> z_vector(const SystemParams& params, const std::vector<S>& y,
                              const std::vector<S>& phat) {
  std::vector<CVal<S>> z(y.size());
  for (std::size_t j = 0; j < y.size(); ++j)
    z[j] = z_of(params, y, phat, static_cast<int>(j));
  return z;
}

// Throws Overflow when |base1|^e1 * |base2|^e2 cannot be represented.
inline void require_pow_in_range(double norm2_base1, int e1, double norm2_base2, int e2) {
  double log2mag = 0.0;
  if (norm2_base1 > 0.0) log2mag += 0.5 * std::log2(norm2_base1) * e1;
  if (norm2_base2 > 0.0) log2mag += 0.5 * std::log2(norm2_base2) * e2;
  if (log2mag > 1000.0)
    throw Overflow("integral magnitude exponent " + std::to_string(log2mag) +
                   " bits exceeds double range; use the normalized form");
}

template <class S>
CVal<S> c_z(const SystemParams& params, const std::vector<CVal<S>>& z, int jc, int kc) {
  const CVal<S> zj = z[static_cast<std::size_t>(jc - 1)];
  const CVal<S> zk = z[static_cast<std::size_t>(kc - 1)];
  const int ek = plane_multiplier(params, kc - 1);
  const int ej = plane_multiplier(params, jc - 1);
  require_pow_in_range(value_of(norm2(zj)), ek, value_of(norm2(zk)), ej);
  return pow_int(zj, ek) * pow_int(conj(zk), ej);
}

template <class S>
CVal<S> c_invariant_t(const SystemParams& params, const std::vector<S>& y,
                      const std::vector<S>& phat, int jc, int kc) {
  return c_z(params, z_vector(params, y, phat), jc, kc);
}

template <class S>
S angular_momentum_t(const std::vector<S>& y, const std::vector<S>& phat, int i, int k) {
  const auto a = static_cast<std::size_t>(i - 1), b = static_cast<std::size_t>(k - 1);
  return y[a] * phat[b] - y[b] * phat[a];
}

template <class S>
S tensor_T_t(const SystemParams& params, const std::vector<S>& y, const std::vector<S>& phat,
             int i, int k) {
  const auto a = static_cast<std::size_t>(i - 1), b = static_cast<std::size_t>(k - 1);
  const double nn = plane_multiplier(params, i - 1) * plane_multiplier(params, k - 1);
  return phat[a] * phat[b] + S(nn * params.omega * params.omega) * y[a] * y[b];
}

template <class S>
CVal<S> xi_z(const std::vector<CVal<S>>& z, int l) {
  const auto a = static_cast<std::size_t>(2 * l - 2), b = static_cast<std::size_t>(2 * l - 1);
  return z[a] * z[a] + z[b] * z[b];
}

template <class S>
S eta_z(const std::vector<CVal<S>>& z, int l) {
  const auto a = static_cast<std::size_t>(2 * l - 2), b = static_cast<std::size_t>(2 * l - 1);
  return norm2(z[a]) + norm2(z[b]);
}

template <class S>
S h_z(const std::vector<CVal<S>>& z) {
  S acc(0.0);
  for (const auto& zj : z) acc += norm2(zj);
  return S(0.5) * acc;
}

template <class S>
CVal<S> q_full_z(const SystemParams& params, const std::vector<CVal<S>>& z, int l,
                 bool normalized) {
  const int N = params.N;
  const int eN = params.n[static_cast<std::size_t>(N - 1)];
  const int el = params.n[static_cast<std::size_t>(l - 1)];
  const CVal<S> xl = xi_z(z, l);
  const CVal<S> xN = xi_z(z, N);
  if (normalized) {
    const S sl = eta_z(z, l);
    const S sN = eta_z(z, N);
    const CVal<S> fl = xl / CVal<S>(sl);
    const CVal<S> fN = xN / CVal<S>(sN);
    return pow_int(fl, eN) * pow_int(conj(fN), el);
  }
  require_pow_in_range(value_of(norm2(xl)), eN, value_of(norm2(xN)), el);
  return pow_int(xl, eN) * pow_int(conj(xN), el);
}

// ---------------------------------------------------------------------------
// Templated evaluators, reduced system

template <class S>
void require_plane_off_singularity(const SystemParams& params, const std::vector<S>& x, int l,
                                   double t = 0.0) {
  if (params.k[static_cast<std::size_t>(l - 1)] != 0.0 &&
      std::abs(value_of(x[static_cast<std::size_t>(l - 1)])) < kExclusionRadius)
    throw SingularState(t, l);
}

template <class S>
S energy_reduced_t(const SystemParams& params, const std::vector<S>& x, const std::vector<S>& p,
                   int l) {
  require_plane_off_singularity(params, x, l);
  const auto i = static_cast<std::size_t>(l - 1);
  const double nw = params.n[i] * params.omega;
  S e = S(0.5) * p[i] * p[i] + S(0.5 * nw * nw) * x[i] * x[i];
  if (params.k[i] != 0.0) e += S(0.5 * params.k[i]) / (x[i] * x[i]);
  return e;
}

// F_l = p^2 + k/x^2 - n^2 w^2 x^2 - 2 i n w p x; |F_l|^2 = 4(E_l^2 - k n^2 w^2).
template <class S>
CVal<S> q_factor_t(const SystemParams& params, const std::vector<S>& x, const std::vector<S>& p,
                   int l) {
  require_plane_off_singularity(params, x, l);
  const auto i = static_cast<std::size_t>(l - 1);
  const double nw = params.n[i] * params.omega;
  S re = p[i] * p[i] - S(nw * nw) * x[i] * x[i];
  if (params.k[i] != 0.0) re += S(params.k[i]) / (x[i] * x[i]);
  const S im = S(-2.0 * nw) * p[i] * x[i];
  return {re, im};
}

template <class S>
CVal<S> q_reduced_t(const SystemParams& params, const std::vector<S>& x, const std::vector<S>& p,
                    int l, bool normalized) {
  const int N = params.N;
  const int eN = params.n[static_cast<std::size_t>(N - 1)];
  const int el = params.n[static_cast<std::size_t>(l - 1)];
  const CVal<S> Fl = q_factor_t(params, x, p, l);
  const CVal<S> FN = q_factor_t(params, x, p, N);
  if (normalized) {
    const S sl = S(2.0) * energy_reduced_t(params, x, p, l);
    const S sN = S(2.0) * energy_reduced_t(params, x, p, N);
    return pow_int(Fl / CVal<S>(sl), eN) * pow_int(conj(FN / CVal<S>(sN)), el);
  }
  require_pow_in_range(value_of(norm2(Fl)), eN, value_of(norm2(FN)), el);
  return pow_int(Fl, eN) * pow_int(conj(FN), el);
}

template <class S>
S r_integral_t(const SystemParams& params, const std::vector<S>& x, const std::vector<S>& p,
               int l) {
  return q_reduced_t(params, x, p, l, /*normalized=*/false).re;
}

template <class S>
S i_modulus_t(const SystemParams& params, const std::vector<S>& x, const std::vector<S>& p,
              int l) {
  return norm2(q_factor_t(params, x, p, l));
}

// ---------------------------------------------------------------------------
// Double-typed wrappers

std::complex<double> c_invariant(const SystemParams& params, const FullState& s, int j, int k);
double angular_momentum(const FullState& s, int i, int k);
double tensor_T(const SystemParams& params, const FullState& s, int i, int k);

struct So2Invariants {
  std::complex<double> xi;
  std::complex<double> xibar;
  double eta;
};
std::vector<So2Invariants> so2_invariants(const SystemParams& params, const ComplexPhase& z);

double energy_reduced(const SystemParams& params, const ReducedState& s, int l);
std::complex<double> q_reduced(const SystemParams& params, const ReducedState& s, int l,
                               bool normalized = false);
double r_integral(const SystemParams& params, const ReducedState& s, int l);

// (lhs, rhs) of |F_l|^2 = 4 (E_l^2 - k_l n_l^2 omega^2); equality is a test
// property.
std::pair<double, double> i_modulus_identity(const SystemParams& params, const ReducedState& s,
                                             int l);

// Uniform dispatch. Real integrals come back with zero imaginary part.
// QFull/QReduced (and conjugates) evaluate in normalized form here — the
// overflow-safe default for verification suites; call q_reduced/q_full_z
// directly for the raw product.
std::complex<double> evaluate(const SystemParams& params, const FullState& s,
                              const IntegralId& id);
std::complex<double> evaluate(const SystemParams& params, const ReducedState& s,
                              const IntegralId& id);
std::vector<std::complex<double>> evaluate_along(const SystemParams& params,
                                                 const Trajectory& traj, const IntegralId& id);

}  // namespace aniso

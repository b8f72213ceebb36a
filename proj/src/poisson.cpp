#include "anisolab/poisson.hpp"

#include <cmath>

namespace aniso {
namespace {

std::complex<double> to_std(CVal<double> v) { return {v.re, v.im}; }

double frobenius(const std::vector<CVal<double>>& a, const std::vector<CVal<double>>& b) {
  double s = 0.0;
  for (const auto& v : a) s += norm2(v);
  for (const auto& v : b) s += norm2(v);
  return std::sqrt(s);
}

}  // namespace

double Gradient::norm() const { return frobenius(dq, dp); }

Gradient gradient(const SystemParams& params, const PhaseFunction& f,
                  const std::vector<double>& q, const std::vector<double>& p) {
  const std::size_t D = q.size();
  std::vector<Dual> qd(q.begin(), q.end()), pd(p.begin(), p.end());
  Gradient g;
  g.dq.resize(D);
  g.dp.resize(D);
  for (std::size_t i = 0; i < D; ++i) {
    qd[i].d = 1.0;
    const CVal<Dual> v = f.eval_dual(params, qd, pd);
    qd[i].d = 0.0;
    g.dq[i] = {v.re.d, v.im.d};
    if (i == 0) g.value = {v.re.v, v.im.v};
  }
  for (std::size_t i = 0; i < D; ++i) {
    pd[i].d = 1.0;
    const CVal<Dual> v = f.eval_dual(params, qd, pd);
    pd[i].d = 0.0;
    g.dp[i] = {v.re.d, v.im.d};
  }
  if (D == 0) {
    const CVal<double> v = f.eval(params, q, p);
    g.value = v;
  }
  return g;
}

BracketValue bracket_canonical(const SystemParams& params, const PhaseFunction& f,
                               const PhaseFunction& g, const std::vector<double>& q,
                               const std::vector<double>& p) {
  if (f.kind() != g.kind())
    throw WrongSystemKind("bracket of functions on different systems: " + f.name() + " vs " +
                          g.name());
  const Gradient gf = gradient(params, f, q, p);
  const Gradient gg = gradient(params, g, q, p);
  CVal<double> acc;
  for (std::size_t i = 0; i < q.size(); ++i)
    acc += gf.dq[i] * gg.dp[i] - gf.dp[i] * gg.dq[i];
  return BracketValue{to_std(acc), gf.norm(), gg.norm()};
}

BracketValue bracket_canonical(const SystemParams& params, const PhaseFunction& f,
                               const PhaseFunction& g, const FullState& s) {
  return bracket_canonical(params, f, g, s.y, s.phat);
}

BracketValue bracket_canonical(const SystemParams& params, const PhaseFunction& f,
                               const PhaseFunction& g, const ReducedState& s) {
  return bracket_canonical(params, f, g, s.x, s.p);
}

ZGradient z_gradient(const SystemParams& params, const ZFunction& f, const ComplexPhase& z) {
  const std::size_t D = z.z.size();
  std::vector<CVal<Dual>> zd(D);
  for (std::size_t j = 0; j < D; ++j)
    zd[j] = CVal<Dual>(Dual(z.z[j].real()), Dual(z.z[j].imag()));

  ZGradient g;
  g.dz.resize(D);
  g.dzbar.resize(D);
  const std::complex<double> mi(0.0, -1.0);  // -i
  for (std::size_t j = 0; j < D; ++j) {
    zd[j].re.d = 1.0;
    const CVal<Dual> va = f.eval_dual(params, zd);
    zd[j].re.d = 0.0;
    zd[j].im.d = 1.0;
    const CVal<Dual> vb = f.eval_dual(params, zd);
    zd[j].im.d = 0.0;
    const std::complex<double> fa(va.re.d, va.im.d);  // d/d(Re z_j)
    const std::complex<double> fb(vb.re.d, vb.im.d);  // d/d(Im z_j)
    g.dz[j] = 0.5 * (fa + mi * fb);
    g.dzbar[j] = 0.5 * (fa - mi * fb);
    if (j == 0) g.value = {va.re.v, va.im.v};
  }
  return g;
}

std::complex<double> bracket_z(const SystemParams& params, const ZFunction& f,
                               const ZFunction& g, const ComplexPhase& z) {
  const ZGradient gf = z_gradient(params, f, z);
  const ZGradient gg = z_gradient(params, g, z);
  std::complex<double> acc(0.0, 0.0);
  for (int l = 0; l < params.N; ++l) {
    std::complex<double> plane(0.0, 0.0);
    for (int j = 2 * l; j <= 2 * l + 1; ++j) {
      const auto u = static_cast<std::size_t>(j);
      plane += gf.dz[u] * gg.dzbar[u] - gf.dzbar[u] * gg.dz[u];
    }
    acc += static_cast<double>(params.n[static_cast<std::size_t>(l)]) * plane;
  }
  return std::complex<double>(0.0, -2.0 * params.omega) * acc;
}

double rotation_generator_residual(const SystemParams& params, const ZFunction& f,
                                   const ComplexPhase& z, int plane) {
  const ZGradient g = z_gradient(params, f, z);
  const auto a = static_cast<std::size_t>(2 * plane - 2), b = static_cast<std::size_t>(2 * plane - 1);
  const std::complex<double> za = z.z[a], zb = z.z[b];
  const std::complex<double> val = zb * g.dz[a] - za * g.dz[b] +
                                   std::conj(zb) * g.dzbar[a] - std::conj(za) * g.dzbar[b];
  double gn = 0.0, zn = 0.0;
  for (std::size_t j = 0; j < z.z.size(); ++j) {
    gn += std::norm(g.dz[j]) + std::norm(g.dzbar[j]);
    zn += std::norm(z.z[j]);
  }
  return std::abs(val) / (std::sqrt(gn) * std::sqrt(zn) + 1e-30);
}

PhaseFunction integral_function(const SystemParams& params, const IntegralId& id,
                                bool normalized_q) {
  const SystemKind kind = id_kind(id);
  validate_id(params, kind, id);
  const std::string name = to_string(id);
  switch (id.tag) {
    case Tag::C:
      return {kind, name, [i = id.i, j = id.j](const SystemParams& P, const auto& y, const auto& ph) {
                return c_invariant_t(P, y, ph, i, j);
              }};
    case Tag::L:
      return {kind, name, [i = id.i, j = id.j](const SystemParams&, const auto& y, const auto& ph) {
                return angular_momentum_t(y, ph, i, j);
              }};
    case Tag::T:
      return {kind, name, [i = id.i, j = id.j](const SystemParams& P, const auto& y, const auto& ph) {
                return tensor_T_t(P, y, ph, i, j);
              }};
    case Tag::Xi:
      return {kind, name, [l = id.i](const SystemParams& P, const auto& y, const auto& ph) {
                return xi_z(z_vector(P, y, ph), l);
              }};
    case Tag::XiBar:
      return {kind, name, [l = id.i](const SystemParams& P, const auto& y, const auto& ph) {
                return conj(xi_z(z_vector(P, y, ph), l));
              }};
    case Tag::Eta:
      return {kind, name, [l = id.i](const SystemParams& P, const auto& y, const auto& ph) {
                return eta_z(z_vector(P, y, ph), l);
              }};
    case Tag::EFull:
      return {kind, name, [l = id.i](const SystemParams& P, const auto& y, const auto& ph) {
                using S = std::decay_t<decltype(y[0])>;
                return S(0.5) * eta_z(z_vector(P, y, ph), l);
              }};
    case Tag::QFull:
      return {kind, name,
              [l = id.i, nq = normalized_q](const SystemParams& P, const auto& y, const auto& ph) {
                return q_full_z(P, z_vector(P, y, ph), l, nq);
              }};
    case Tag::QBarFull:
      return {kind, name,
              [l = id.i, nq = normalized_q](const SystemParams& P, const auto& y, const auto& ph) {
                return conj(q_full_z(P, z_vector(P, y, ph), l, nq));
              }};
    case Tag::HFull:
      return {kind, name, [](const SystemParams& P, const auto& y, const auto& ph) {
                return hamiltonian_full_t(P, y, ph);
              }};
    case Tag::EReduced:
      return {kind, name, [l = id.i](const SystemParams& P, const auto& x, const auto& p) {
                return energy_reduced_t(P, x, p, l);
              }};
    case Tag::QReduced:
      return {kind, name,
              [l = id.i, nq = normalized_q](const SystemParams& P, const auto& x, const auto& p) {
                return q_reduced_t(P, x, p, l, nq);
              }};
    case Tag::QBarReduced:
      return {kind, name,
              [l = id.i, nq = normalized_q](const SystemParams& P, const auto& x, const auto& p) {
                return conj(q_reduced_t(P, x, p, l, nq));
              }};
    case Tag::R:
      return {kind, name, [l = id.i](const SystemParams& P, const auto& x, const auto& p) {
                return r_integral_t(P, x, p, l);
              }};
    case Tag::IMod:
      return {kind, name, [l = id.i](const SystemParams& P, const auto& x, const auto& p) {
                return i_modulus_t(P, x, p, l);
              }};
    case Tag::HReduced:
      return {kind, name, [](const SystemParams& P, const auto& x, const auto& p) {
                return hamiltonian_reduced_t(P, x, p);
              }};
  }
  throw UnknownIntegral("unhandled integral tag");
}

PhaseFunction coordinate_function(SystemKind kind, int index, bool momentum) {
  const std::string name =
      (momentum ? "p" : "q") + std::to_string(index + 1) + "[" + system_kind_name(kind) + "]";
  const auto u = static_cast<std::size_t>(index);
  if (momentum)
    return {kind, name,
            [u](const SystemParams&, const auto&, const auto& p) { return p[u]; }};
  return {kind, name, [u](const SystemParams&, const auto& q, const auto&) { return q[u]; }};
}

PhaseFunction product(const PhaseFunction& f, const PhaseFunction& g) {
  if (f.kind() != g.kind())
    throw WrongSystemKind("product of functions on different systems: " + f.name() + " vs " +
                          g.name());
  return {f.kind(), f.name() + "*" + g.name(),
          [f, g](const SystemParams& P, const auto& q, const auto& p) {
            using S = std::decay_t<decltype(q[0])>;
            if constexpr (std::is_same_v<S, double>)
              return f.eval(P, q, p) * g.eval(P, q, p);
            else
              return f.eval_dual(P, q, p) * g.eval_dual(P, q, p);
          }};
}

ZFunction z_integral_function(const SystemParams& params, const IntegralId& id,
                              bool normalized_q) {
  validate_id(params, SystemKind::Full, id);
  const std::string name = to_string(id) + "[z]";
  switch (id.tag) {
    case Tag::C:
      return {name, [i = id.i, j = id.j](const SystemParams& P, const auto& z) {
                return c_z(P, z, i, j);
              }};
    case Tag::L:
      // y_j = -Im z_j / (n(j) omega), phat_j = Re z_j.
      return {name, [i = id.i, j = id.j](const SystemParams& P, const auto& z) {
                const auto a = static_cast<std::size_t>(i - 1), b = static_cast<std::size_t>(j - 1);
                const double ni = plane_multiplier(P, i - 1), nj = plane_multiplier(P, j - 1);
                return (z[b].im * z[a].re / (nj * P.omega)) -
                       (z[a].im * z[b].re / (ni * P.omega));
              }};
    case Tag::T:
      return {name, [i = id.i, j = id.j](const SystemParams&, const auto& z) {
                const auto a = static_cast<std::size_t>(i - 1), b = static_cast<std::size_t>(j - 1);
                return (conj(z[a]) * z[b]).re;
              }};
    case Tag::Xi:
      return {name, [l = id.i](const SystemParams&, const auto& z) { return xi_z(z, l); }};
    case Tag::XiBar:
      return {name, [l = id.i](const SystemParams&, const auto& z) { return conj(xi_z(z, l)); }};
    case Tag::Eta:
      return {name, [l = id.i](const SystemParams&, const auto& z) { return eta_z(z, l); }};
    case Tag::EFull:
      return {name, [l = id.i](const SystemParams&, const auto& z) {
                using S = std::decay_t<decltype(z[0].re)>;
                return S(0.5) * eta_z(z, l);
              }};
    case Tag::QFull:
      return {name, [l = id.i, nq = normalized_q](const SystemParams& P, const auto& z) {
                return q_full_z(P, z, l, nq);
              }};
    case Tag::QBarFull:
      return {name, [l = id.i, nq = normalized_q](const SystemParams& P, const auto& z) {
                return conj(q_full_z(P, z, l, nq));
              }};
    case Tag::HFull:
      return {name, [](const SystemParams&, const auto& z) { return h_z(z); }};
    default:
      throw WrongSystemKind("no z-space form for reduced-system integral " + to_string(id));
  }
}

PhaseFunction pullback(const ZFunction& zf) {
  return {SystemKind::Full, "pullback(" + zf.name() + ")",
          [zf](const SystemParams& P, const auto& y, const auto& ph) {
            using S = std::decay_t<decltype(y[0])>;
            const auto z = z_vector(P, y, ph);
            if constexpr (std::is_same_v<S, double>)
              return zf.eval(P, z);
            else
              return zf.eval_dual(P, z);
          }};
}

CommutationReport commutation_report(const SystemParams& params, SystemKind kind,
                                     const std::vector<std::pair<IntegralId, IntegralId>>& pairs,
                                     int samples, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("commutation_report requires samples >= 1");
  CommutationReport report;
  report.seed = seed;
  report.samples = samples;

  std::vector<std::pair<PhaseFunction, PhaseFunction>> fns;
  fns.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    validate_id(params, kind, a);
    validate_id(params, kind, b);
    fns.emplace_back(integral_function(params, a), integral_function(params, b));
    report.pairs.push_back(PairResult{a, b, 0.0, false});
  }

  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    std::vector<double> q, p;
    if (kind == SystemKind::Full) {
      FullState st = sample_full_state(params, rng);
      q = std::move(st.y);
      p = std::move(st.phat);
    } else {
      ReducedState st = sample_reduced_state(params, rng);
      q = std::move(st.x);
      p = std::move(st.p);
    }
    for (std::size_t i = 0; i < fns.size(); ++i) {
      const BracketValue bv = bracket_canonical(params, fns[i].first, fns[i].second, q, p);
      report.pairs[i].max_scaled_residual =
          std::max(report.pairs[i].max_scaled_residual, bv.scaled());
    }
  }
  for (auto& pr : report.pairs) {
    pr.pass = pr.max_scaled_residual < kBracketTol;
    report.all_pass = report.all_pass && pr.pass;
  }
  return report;
}

nlohmann::json to_json(const CommutationReport& report) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& pr : report.pairs) {
    pairs.push_back({{"pair", {to_string(pr.a), to_string(pr.b)}},
                     {"max_scaled_residual", pr.max_scaled_residual},
                     {"pass", pr.pass},
                     {"seed", report.seed},
                     {"samples", report.samples}});
  }
  return nlohmann::json{{"pairs", pairs},
                        {"seed", report.seed},
                        {"samples", report.samples},
                        {"all_pass", report.all_pass}};
}

}  // namespace aniso

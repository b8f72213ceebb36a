#include "anisolab/invariants.hpp"

#include <array>
#include <cstdio>

namespace aniso {
namespace {

struct TagInfo {
  Tag tag;
  const char* name;
  int arity;  // number of indices in the printed form
};

constexpr std::array<TagInfo, 16> kTags{{
    {Tag::C, "C", 2},
    {Tag::L, "L", 2},
    {Tag::T, "T", 2},
    {Tag::Xi, "Xi", 1},
    {Tag::XiBar, "XiBar", 1},
    {Tag::Eta, "Eta", 1},
    {Tag::EFull, "EFull", 1},
    {Tag::QFull, "QFull", 1},
    {Tag::QBarFull, "QBarFull", 1},
    {Tag::EReduced, "EReduced", 1},
    {Tag::QReduced, "QReduced", 1},
    {Tag::QBarReduced, "QBarReduced", 1},
    {Tag::R, "R", 1},
    {Tag::IMod, "IMod", 1},
    {Tag::HFull, "HFull", 0},
    {Tag::HReduced, "HReduced", 0},
}};

const TagInfo& info_of(Tag tag) {
  for (const auto& ti : kTags)
    if (ti.tag == tag) return ti;
  throw UnknownIntegral("unhandled integral tag");
}

}  // namespace

std::string to_string(const IntegralId& id) {
  const TagInfo& ti = info_of(id.tag);
  switch (ti.arity) {
    case 0: return ti.name;
    case 1: return std::string(ti.name) + "(" + std::to_string(id.i) + ")";
    default:
      return std::string(ti.name) + "(" + std::to_string(id.i) + "," + std::to_string(id.j) + ")";
  }
}

IntegralId parse_integral_id(const std::string& txt) {
  std::string name = txt;
  int i = 0, j = 0;
  int arity = 0;
  const auto paren = txt.find('(');
  if (paren != std::string::npos) {
    if (txt.back() != ')') throw UnknownIntegral("malformed integral id \"" + txt + "\"");
    name = txt.substr(0, paren);
    const std::string inner = txt.substr(paren + 1, txt.size() - paren - 2);
    const auto comma = inner.find(',');
    try {
      if (comma == std::string::npos) {
        i = std::stoi(inner);
        arity = 1;
      } else {
        i = std::stoi(inner.substr(0, comma));
        j = std::stoi(inner.substr(comma + 1));
        arity = 2;
      }
    } catch (const std::exception&) {
      throw UnknownIntegral("malformed integral id \"" + txt + "\"");
    }
  }
  for (const auto& ti : kTags) {
    if (name == ti.name) {
      if (arity != ti.arity)
        throw UnknownIntegral("integral " + name + " takes " + std::to_string(ti.arity) +
                              " indices, got \"" + txt + "\"");
      return IntegralId{ti.tag, i, j};
    }
  }
  throw UnknownIntegral("unknown integral id \"" + txt + "\"");
}

SystemKind id_kind(const IntegralId& id) {
  switch (id.tag) {
    case Tag::C:
    case Tag::L:
    case Tag::T:
    case Tag::Xi:
    case Tag::XiBar:
    case Tag::Eta:
    case Tag::EFull:
    case Tag::QFull:
    case Tag::QBarFull:
    case Tag::HFull:
      return SystemKind::Full;
    default:
      return SystemKind::Reduced;
  }
}

void validate_id(const SystemParams& params, SystemKind kind, const IntegralId& id) {
  if (id_kind(id) != kind)
    throw WrongSystemKind("integral " + to_string(id) + " is a " +
                          system_kind_name(id_kind(id)) + "-system function, evaluated on a " +
                          system_kind_name(kind) + " state");
  const int N = params.N;
  auto in = [](int v, int lo, int hi) { return v >= lo && v <= hi; };
  switch (id.tag) {
    case Tag::C:
    case Tag::L:
    case Tag::T:
      if (!in(id.i, 1, 2 * N) || !in(id.j, 1, 2 * N))
        throw UnknownIntegral("coordinate index out of range in " + to_string(id));
      if (id.tag == Tag::L && id.i == id.j)
        throw UnknownIntegral("angular momentum needs two distinct coordinates, got " +
                              to_string(id));
      break;
    case Tag::Xi:
    case Tag::XiBar:
    case Tag::Eta:
    case Tag::EFull:
    case Tag::EReduced:
    case Tag::IMod:
      if (!in(id.i, 1, N)) throw UnknownIntegral("plane index out of range in " + to_string(id));
      break;
    case Tag::QFull:
    case Tag::QBarFull:
    case Tag::QReduced:
    case Tag::QBarReduced:
    case Tag::R:
      if (!in(id.i, 1, N - 1))
        throw UnknownIntegral("index must pair a plane 1..N-1 with plane N in " + to_string(id));
      break;
    case Tag::HFull:
    case Tag::HReduced:
      break;
  }
}

bool is_conserved(const SystemParams& params, const IntegralId& id) {
  if (id.tag == Tag::L || id.tag == Tag::T)
    return plane_multiplier(params, id.i - 1) == plane_multiplier(params, id.j - 1);
  return true;
}

std::complex<double> c_invariant(const SystemParams& params, const FullState& s, int j, int k) {
  const CVal<double> v = c_invariant_t(params, s.y, s.phat, j, k);
  return {v.re, v.im};
}

double angular_momentum(const FullState& s, int i, int k) {
  return angular_momentum_t(s.y, s.phat, i, k);
}

double tensor_T(const SystemParams& params, const FullState& s, int i, int k) {
  return tensor_T_t(params, s.y, s.phat, i, k);
}

std::vector<So2Invariants> so2_invariants(const SystemParams& params, const ComplexPhase& z) {
  std::vector<So2Invariants> out;
  out.reserve(static_cast<std::size_t>(params.N));
  for (int l = 1; l <= params.N; ++l) {
    const auto a = static_cast<std::size_t>(2 * l - 2), b = static_cast<std::size_t>(2 * l - 1);
    const std::complex<double> xi = z.z[a] * z.z[a] + z.z[b] * z.z[b];
    const double eta = std::norm(z.z[a]) + std::norm(z.z[b]);
    out.push_back(So2Invariants{xi, std::conj(xi), eta});
  }
  return out;
}

double energy_reduced(const SystemParams& params, const ReducedState& s, int l) {
  return energy_reduced_t(params, s.x, s.p, l);
}

std::complex<double> q_reduced(const SystemParams& params, const ReducedState& s, int l,
                               bool normalized) {
  const CVal<double> v = q_reduced_t(params, s.x, s.p, l, normalized);
  return {v.re, v.im};
}

double r_integral(const SystemParams& params, const ReducedState& s, int l) {
  return r_integral_t(params, s.x, s.p, l);
}

std::pair<double, double> i_modulus_identity(const SystemParams& params, const ReducedState& s,
                                             int l) {
  const double lhs = i_modulus_t(params, s.x, s.p, l);
  const auto i = static_cast<std::size_t>(l - 1);
  const double e = energy_reduced(params, s, l);
  const double nw = params.n[i] * params.omega;
  const double rhs = 4.0 * (e * e - params.k[i] * nw * nw);
  return {lhs, rhs};
}

std::complex<double> evaluate(const SystemParams& params, const FullState& s,
                              const IntegralId& id) {
  validate_id(params, SystemKind::Full, id);
  const auto z = z_vector(params, s.y, s.phat);
  auto c = [](CVal<double> v) { return std::complex<double>(v.re, v.im); };
  switch (id.tag) {
    case Tag::C: return c(c_z(params, z, id.i, id.j));
    case Tag::L: return angular_momentum(s, id.i, id.j);
    case Tag::T: return tensor_T(params, s, id.i, id.j);
    case Tag::Xi: return c(xi_z(z, id.i));
    case Tag::XiBar: return c(conj(xi_z(z, id.i)));
    case Tag::Eta: return eta_z(z, id.i);
    case Tag::EFull: return 0.5 * eta_z(z, id.i);
    case Tag::QFull: return c(q_full_z(params, z, id.i, /*normalized=*/true));
    case Tag::QBarFull: return c(conj(q_full_z(params, z, id.i, /*normalized=*/true)));
    case Tag::HFull: return hamiltonian_full(params, s);
    default: throw WrongSystemKind("unreachable");  // validate_id already rejected
  }
}

std::complex<double> evaluate(const SystemParams& params, const ReducedState& s,
                              const IntegralId& id) {
  validate_id(params, SystemKind::Reduced, id);
  switch (id.tag) {
    case Tag::EReduced: return energy_reduced(params, s, id.i);
    case Tag::QReduced: return q_reduced(params, s, id.i, /*normalized=*/true);
    case Tag::QBarReduced: return std::conj(q_reduced(params, s, id.i, /*normalized=*/true));
    case Tag::R: return r_integral(params, s, id.i);
    case Tag::IMod: return i_modulus_t(params, s.x, s.p, id.i);
    case Tag::HReduced: return hamiltonian_reduced(params, s);
    default: throw WrongSystemKind("unreachable");
  }
}

std::vector<std::complex<double>> evaluate_along(const SystemParams& params,
                                                 const Trajectory& traj, const IntegralId& id) {
  validate_id(params, traj.kind, id);
  std::vector<std::complex<double>> vals;
  vals.reserve(traj.size());
  for (std::size_t s = 0; s < traj.size(); ++s) {
    if (traj.kind == SystemKind::Full)
      vals.push_back(evaluate(params, traj.full_at(s), id));
    else
      vals.push_back(evaluate(params, traj.reduced_at(s), id));
  }
  return vals;
}

}  // namespace aniso

#include "anisolab/model.hpp"

#include <cmath>
#include <cstdlib>

namespace aniso {

SystemParams validate_params(const SystemParams& raw) {
  if (raw.N < 1) throw NonPositiveDimension(raw.N);
  const auto N = static_cast<std::size_t>(raw.N);
  if (raw.n.size() != N || raw.k.size() != N)
    throw ConfigError("n and k must each have exactly N entries (N=" +
                      std::to_string(raw.N) + ", got " + std::to_string(raw.n.size()) +
                      " multipliers and " + std::to_string(raw.k.size()) +
                      " coefficients)");
  for (std::size_t i = 0; i < N; ++i) {
    if (raw.n[i] < 1)
      throw NonIntegerMultiplier("frequency multipliers must be integers >= 1; n_" +
                                 std::to_string(i + 1) + " = " + std::to_string(raw.n[i]));
    if (!std::isfinite(raw.k[i]))
      throw ConfigError("k_" + std::to_string(i + 1) + " is not finite");
  }
  if (!std::isfinite(raw.omega) || raw.omega <= 0.0) throw NonPositiveOmega(raw.omega);
  return raw;
}

ComplexPhase to_complex(const SystemParams& params, const FullState& s) {
  const std::size_t D = 2 * static_cast<std::size_t>(params.N);
  ComplexPhase out;
  out.z.resize(D);
  for (std::size_t j = 0; j < D; ++j) {
    const double nw = plane_multiplier(params, static_cast<int>(j)) * params.omega;
    out.z[j] = std::complex<double>(s.phat[j], -nw * s.y[j]);
  }
  return out;
}

FullState to_full(const SystemParams& params, const ComplexPhase& z, double t) {
  const std::size_t D = 2 * static_cast<std::size_t>(params.N);
  FullState out;
  out.y.resize(D);
  out.phat.resize(D);
  out.t = t;
  for (std::size_t j = 0; j < D; ++j) {
    const double nw = plane_multiplier(params, static_cast<int>(j)) * params.omega;
    out.phat[j] = z.z[j].real();
    out.y[j] = -z.z[j].imag() / nw;
  }
  return out;
}

void require_off_singularity(const SystemParams& params, const ReducedState& s) {
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    if (params.k[i] != 0.0 && std::abs(s.x[i]) < kExclusionRadius)
      throw SingularState(s.t, static_cast<int>(i) + 1);
  }
}

void to_json(nlohmann::json& j, const SystemParams& params) {
  j = nlohmann::json{{"N", params.N}, {"n", params.n}, {"k", params.k}, {"omega", params.omega}};
}

void from_json(const nlohmann::json& j, SystemParams& params) {
  if (!j.is_object()) throw ConfigError("params must be a JSON object");
  for (const char* field : {"N", "n", "k", "omega"}) {
    if (!j.contains(field))
      throw ConfigError(std::string("params missing required field \"") + field + "\"");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "N" && it.key() != "n" && it.key() != "k" && it.key() != "omega")
      throw ConfigError("unknown params field \"" + it.key() + "\"");
  }
  if (!j.at("N").is_number_integer()) throw ConfigError("params field N must be an integer");
  params.N = j.at("N").get<int>();
  if (!j.at("n").is_array()) throw ConfigError("params field n must be an array");
  params.n.clear();
  for (const auto& e : j.at("n")) {
    if (!e.is_number_integer())
      throw NonIntegerMultiplier("frequency multipliers must be integers, got " + e.dump());
    params.n.push_back(e.get<int>());
  }
  if (!j.at("k").is_array()) throw ConfigError("params field k must be an array");
  params.k.clear();
  for (const auto& e : j.at("k")) {
    if (!e.is_number()) throw ConfigError("params field k must contain numbers");
    params.k.push_back(e.get<double>());
  }
  if (!j.at("omega").is_number()) throw ConfigError("params field omega must be a number");
  params.omega = j.at("omega").get<double>();
}

ReducedState sample_reduced_state(const SystemParams& params, Rng& rng) {
  ReducedState s;
  const auto N = static_cast<std::size_t>(params.N);
  s.x.resize(N);
  s.p.resize(N);
  for (std::size_t i = 0; i < N; ++i) s.x[i] = rng.uniform(0.3, 2.0);
  for (std::size_t i = 0; i < N; ++i) s.p[i] = rng.uniform(-2.0, 2.0);
  return s;
}

FullState sample_full_state(const SystemParams& params, Rng& rng) {
  FullState s;
  const auto N = static_cast<std::size_t>(params.N);
  s.y.resize(2 * N);
  s.phat.resize(2 * N);
  for (std::size_t l = 0; l < N; ++l) {
    double a = 0.0, b = 0.0;
    do {
      a = rng.uniform(-2.0, 2.0);
      b = rng.uniform(-2.0, 2.0);
    } while (a * a + b * b < 0.3 * 0.3);
    s.y[2 * l] = a;
    s.y[2 * l + 1] = b;
  }
  for (std::size_t j = 0; j < 2 * N; ++j) s.phat[j] = rng.uniform(-2.0, 2.0);
  return s;
}

}  // namespace aniso

// The per-plane polar chart, the angular-momentum level set (lift), the
// trajectory projection, and the dynamical consistency between the reduced
// flow and the projected full flow.

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "anisolab/analysis.hpp"
#include "anisolab/invariants.hpp"
#include "anisolab/reduction.hpp"
#include "helpers.hpp"

using namespace aniso;
using testutil::make_params;
using testutil::rel_diff;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPi = std::numbers::pi;
}  // namespace

TEST_CASE("polar chart matches hand-evaluated plane data") {
  const auto params = make_params(1, {1}, {1.0});

  SUBCASE("circular data") {
    const auto m = to_multipolar(params, {{1.0, 0.0}, {0.0, 1.0}, 0.0});
    CHECK(m.x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.phi[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(m.p[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(m.ell[0] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("radius two on the vertical axis") {
    const auto m = to_multipolar(params, {{0.0, 2.0}, {3.0, 0.0}, 0.0});
    CHECK(m.x[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(m.phi[0] == doctest::Approx(kPi / 2).epsilon(1e-14));
    CHECK(m.p[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(m.ell[0] == doctest::Approx(-6.0).epsilon(1e-15));
  }
  SUBCASE("axis states are rejected with the plane index") {
    try {
      to_multipolar(params, {{0.0, 0.0}, {1.0, 1.0}, 2.5});
      FAIL("expected AxisSingularity");
    } catch (const AxisSingularity& e) {
      CHECK(e.plane == 1);
      CHECK(e.t == 2.5);
    }
  }
}

TEST_CASE("polar chart round-trips 100 random off-axis states") {
  const auto params = make_params(3, {1, 2, 4}, {0.5, 0.0, 1.5}, 1.3);
  Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const FullState s = sample_full_state(params, rng);
    const auto m = to_multipolar(params, s);
    for (double phi : m.phi) {
      CHECK(phi >= 0.0);
      CHECK(phi < kTwoPi);
    }
    const FullState back = from_multipolar(params, m);
    for (std::size_t j = 0; j < s.y.size(); ++j) {
      CHECK(std::abs(back.y[j] - s.y[j]) <= 1e-13 * std::max(1.0, std::abs(s.y[j])));
      CHECK(std::abs(back.phat[j] - s.phat[j]) <= 1e-13 * std::max(1.0, std::abs(s.phat[j])));
    }
  }
}

TEST_CASE("lift places the state on the angular-momentum level set") {
  const auto params = make_params(2, {1, 2}, {0.5, 0.25}, 1.1);
  Rng rng(62);
  for (int trial = 0; trial < 30; ++trial) {
    const ReducedState s = sample_reduced_state(params, rng);
    const std::vector<double> angles{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
    const FullState lifted = lift(params, s, angles);

    const auto m = to_multipolar(params, lifted);
    for (int l = 0; l < 2; ++l) {
      const auto u = static_cast<std::size_t>(l);
      CHECK(rel_diff(m.x[u], s.x[u]) < 1e-13);
      CHECK(std::abs(m.p[u] - s.p[u]) < 1e-13);
      CHECK(std::abs(m.ell[u] - std::sqrt(params.k[u])) < 1e-13);
      CHECK(std::abs(std::remainder(m.phi[u] - angles[u], kTwoPi)) < 1e-13);
    }

    // Energy carries across the lift.
    CHECK(rel_diff(hamiltonian_full(params, lifted), hamiltonian_reduced(params, s)) < 1e-12);
  }
}

TEST_CASE("lift rejects negative centrifugal coefficients") {
  const auto params = make_params(2, {1, 1}, {0.5, -0.1});
  try {
    lift(params, {{1.0, 1.0}, {0.0, 0.0}, 0.0}, {0.0, 0.0});
    FAIL("expected NegativeK");
  } catch (const NegativeK& e) {
    CHECK(e.index == 2);
  }
}

TEST_CASE("zero-k lift confines each plane to a line through the origin") {
  const auto params = make_params(1, {1}, {0.0});
  const FullState s0 = lift(params, {{1.2}, {0.4}, 0.0}, {0.0});
  CHECK(angular_momentum(s0, 1, 2) == 0.0);

  const Trajectory traj = integrate(params, s0, 1e-3, kTwoPi, Method::Yoshida4);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(std::abs(traj.q[i][1]) < 1e-12);  // y_2 never leaves the line
    CHECK(std::abs(traj.p[i][1]) < 1e-12);
  }
}

TEST_CASE("angular momenta are conserved along full trajectories from any lift") {
  const auto params = make_params(2, {1, 2}, {0.5, 0.25});
  Rng rng(63);
  const ReducedState s = sample_reduced_state(params, rng);
  const FullState lifted = lift(params, s, {0.7, 2.1});
  const Trajectory traj = integrate_oracle(params, lifted, 2.0 * kTwoPi, 1e-10);

  const auto l1 = evaluate_along(params, traj, IntegralId{Tag::L, 1, 2});
  const auto l2 = evaluate_along(params, traj, IntegralId{Tag::L, 3, 4});
  CHECK(drift_metric(l1) < 1e-9);
  CHECK(drift_metric(l2) < 1e-9);
}

TEST_CASE("projected full trajectories carry the reduced integrals pointwise") {
  const auto params = make_params(2, {1, 2}, {0.5, 0.25}, 1.2);
  Rng rng(64);
  const ReducedState s = sample_reduced_state(params, rng);
  const FullState lifted = lift(params, s, {0.0, 0.0});
  const Trajectory full = integrate_oracle(params, lifted, 1.5 * kTwoPi / params.omega, 1e-10);
  const Trajectory reduced = reduce_trajectory(params, full);

  REQUIRE(reduced.size() == full.size());
  CHECK(reduced.kind == SystemKind::Reduced);
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    CHECK(reduced.t[i] == full.t[i]);
    const ReducedState ri = reduced.reduced_at(i);
    const FullState fi = full.full_at(i);
    for (int l = 1; l <= 2; ++l) {
      const double e_red = energy_reduced(params, ri, l);
      const double e_full = evaluate(params, fi, IntegralId{Tag::EFull, l, 0}).real();
      CHECK(rel_diff(e_red, e_full) < 1e-9);
    }
    const auto q_red = evaluate(params, ri, IntegralId{Tag::QReduced, 1, 0});
    const auto q_full = evaluate(params, fi, IntegralId{Tag::QFull, 1, 0});
    CHECK(std::abs(q_red - q_full) < 1e-9);
  }
}

TEST_CASE("reduce_trajectory reports the failing time at an axis crossing") {
  const auto params = make_params(1, {1}, {0.0});
  Trajectory traj;
  traj.kind = SystemKind::Full;
  traj.method = Method::Yoshida4;
  traj.dt = 0.1;
  traj.t = {0.0, 0.1};
  traj.q = {{1.0, 0.0}, {0.0, 0.0}};  // second sample on the axis
  traj.p = {{0.0, 0.0}, {0.0, 0.0}};
  try {
    reduce_trajectory(params, traj);
    FAIL("expected AxisSingularity");
  } catch (const AxisSingularity& e) {
    CHECK(e.t == 0.1);
  }
}

TEST_CASE("reduced flow matches the projected full flow") {
  SUBCASE("single plane with a centrifugal term") {
    const auto params = make_params(1, {1}, {1.0});
    const ReducedState s0{{1.4}, {0.3}, 0.0};
    const auto report = consistency_check(params, s0, 5.0 * kTwoPi, 1e-3);
    CHECK(report.max_dev < 1e-6);
    CHECK_FALSE(report.truncated);
    CHECK(report.dt == 1e-3);
    CHECK(report.method == Method::Yoshida4);
    CHECK(report.t_checked > 5.0 * kTwoPi - 1e-2);
  }
  SUBCASE("two planes in 1:2 resonance") {
    // A sampled (energetic) start swings closer to the axis than the turning
    // surface does, where the polar chart amplifies step error; a finer step
    // keeps the comparison well under the bound.
    const auto params = make_params(2, {1, 2}, {0.5, 0.25});
    Rng rng(65);
    const ReducedState s0 = sample_reduced_state(params, rng);
    const auto report = consistency_check(params, s0, 5.0 * kTwoPi, 5e-4);
    CHECK(report.max_dev < 1e-6);
    CHECK_FALSE(report.truncated);
  }
}

TEST_CASE("zero-k planes stop the comparison at the first axis crossing") {
  const auto params = make_params(1, {1}, {0.0});
  // x(t) = 1.2 cos(t) reaches the axis at t = pi/2.
  const auto report = consistency_check(params, {{1.2}, {0.0}, 0.0}, kTwoPi, 1e-3);
  CHECK(report.truncated);
  CHECK(report.t_checked < kTwoPi);
  CHECK(report.t_checked > 1.0);  // most of the quarter period was still compared
  CHECK(report.max_dev < 1e-6);

  const nlohmann::json j = to_json(report);
  CHECK(j.contains("truncated_at"));
  CHECK(j["max_dev"].get<double>() == report.max_dev);
  CHECK(j["dt"] == 1e-3);
  CHECK(j["method"] == "Yoshida4");
  CHECK(j.contains("t_of_max"));
}

TEST_CASE("consistency deviation drops at fourth order when dt is halved") {
  const auto params = make_params(1, {1}, {1.0});
  const ReducedState s0{{1.4}, {0.3}, 0.0};
  const double coarse = consistency_check(params, s0, kPi, 0.05).max_dev;
  const double fine = consistency_check(params, s0, kPi, 0.025).max_dev;
  CHECK(coarse > 1e-12);  // far from the roundoff floor, so the ratio is meaningful
  CHECK(coarse / fine >= 12.0);
}

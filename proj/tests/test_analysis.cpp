// Verdict machinery: drift metric, conservation reports, functional
// independence rank, orbit-closure periods, turning-surface starts, momentum
// degrees, the verification driver, and the batch survey.
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "anisolab/analysis.hpp"
#include "anisolab/dynamics.hpp"
#include "anisolab/invariants.hpp"
#include "anisolab/model.hpp"
#include "anisolab/reduction.hpp"
#include "helpers.hpp"

using namespace aniso;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

TEST_CASE("drift metric measures worst excursion relative to the initial value") {
  CHECK(drift_metric({}) == 0.0);

  const std::vector<std::complex<double>> constant(5, {2.0, 0.0});
  CHECK(drift_metric(constant) == 0.0);

  const std::vector<std::complex<double>> spike{{2.0, 0.0}, {2.0 + 2e-6, 0.0}, {2.0, 0.0}};
  CHECK(drift_metric(spike) == doctest::Approx(1e-6).epsilon(1e-9));

  // A zero initial value falls back to the absolute floor, so any later
  // nonzero value registers as an enormous drift rather than dividing by zero.
  const std::vector<std::complex<double>> from_zero{{0.0, 0.0}, {1e-20, 0.0}};
  CHECK(drift_metric(from_zero) > 1.0);
}

TEST_CASE("conservation report: all reduced integrals hold along a pinned trajectory") {
  const SystemParams params = testutil::make_params(3, {1, 2, 3}, {0.5, 1.0, 0.25});
  const ReducedState s0 = radial_turning_state(params, turning_amplitudes(3));
  const Trajectory traj = integrate(params, s0, 1e-3 * kTwoPi, 10.0 * kTwoPi, Method::Yoshida4);

  std::vector<IntegralId> ids = reduced_integral_set(params);
  ids.push_back({Tag::HReduced, 0, 0});
  const ConservationReport report = conservation_report(params, traj, ids);

  REQUIRE(report.entries.size() == 6);
  for (const auto& entry : report.entries) {
    CAPTURE(to_string(entry.id));
    CHECK(entry.conserved_expected);
    CHECK(entry.max_rel_drift < kDriftTol);
  }
  CHECK(report.all_conserved_ok);
}

TEST_CASE("conservation report: cross-plane probes with unequal multipliers are flagged "
          "not-expected and measurably drift") {
  const SystemParams params = testutil::make_params(2, {1, 2}, {0.0, 0.0});
  Rng rng(77);
  const FullState s0 = sample_full_state(params, rng);
  const Trajectory traj = integrate(params, s0, 1e-3 * kTwoPi, 2.0 * kTwoPi, Method::Yoshida4);

  const std::vector<IntegralId> ids{{Tag::L, 1, 3},
                                    {Tag::T, 1, 3},
                                    {Tag::Eta, 1, 0},
                                    {Tag::HFull, 0, 0}};
  const ConservationReport report = conservation_report(params, traj, ids);
  REQUIRE(report.entries.size() == 4);

  CHECK_FALSE(report.entries[0].conserved_expected);  // L(1,3), planes 1 vs 2
  CHECK(report.entries[0].max_rel_drift > 1e-3);
  CHECK_FALSE(report.entries[1].conserved_expected);  // T(1,3)
  CHECK(report.entries[1].max_rel_drift > 1e-3);
  CHECK(report.entries[2].conserved_expected);
  CHECK(report.entries[2].max_rel_drift < kDriftTol);
  CHECK(report.entries[3].conserved_expected);
  CHECK(report.entries[3].max_rel_drift < kDriftTol);

  // Expected-nonconserved probes do not fail the verdict.
  CHECK(report.all_conserved_ok);
}

TEST_CASE("conservation report: a coordinate probe is not conserved") {
  const SystemParams params = testutil::make_params(1, {1}, {1.0});
  const ReducedState s0 = radial_turning_state(params, turning_amplitudes(1));
  const Trajectory traj = integrate(params, s0, 1e-3 * kTwoPi, kTwoPi, Method::Yoshida4);

  // The coordinate itself oscillates by construction; drift_metric on its
  // samples must report an order-one excursion.
  std::vector<std::complex<double>> xs;
  xs.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) xs.emplace_back(traj.q[i][0], 0.0);
  CHECK(drift_metric(xs) > 0.1);
}

TEST_CASE("independence rank: equal-multiplier pair gives rank 3, and swapping the coupling "
          "integral for the Hamiltonian drops it to 2") {
  const SystemParams params = testutil::make_params(2, {1, 1}, {0.3, 0.7});
  const std::vector<IntegralId> independent{
      {Tag::EReduced, 1, 0}, {Tag::EReduced, 2, 0}, {Tag::R, 1, 0}};
  const std::vector<IntegralId> dependent{
      {Tag::EReduced, 1, 0}, {Tag::EReduced, 2, 0}, {Tag::HReduced, 0, 0}};

  Rng rng(mix_seed(5, 0x1234));
  for (int trial = 0; trial < 5; ++trial) {
    const ReducedState s = sample_reduced_state(params, rng);
    const RankResult r_ind = independence_rank(params, independent, s);
    CHECK(r_ind.rank == 3);
    REQUIRE(r_ind.singular_values.size() == 3);  // all-real rows, one each
    CHECK(r_ind.singular_values[0] >= r_ind.singular_values[1]);
    CHECK(r_ind.singular_values[1] >= r_ind.singular_values[2]);

    // H = E1 + E2 is a linear combination: one singular value collapses.
    const RankResult r_dep = independence_rank(params, dependent, s);
    CHECK(r_dep.rank == 2);
  }
}

TEST_CASE("independence rank: the 2N-1 reduced integrals are independent at most sampled "
          "states for N=4") {
  const SystemParams params = testutil::make_params(4, {1, 2, 3, 4}, {0.6, 1.1, 0.4, 1.7});
  const std::vector<IntegralId> ids = reduced_integral_set(params);
  REQUIRE(ids.size() == 7);

  Rng rng(mix_seed(5, 0xABCD));
  int agree = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const ReducedState s = sample_reduced_state(params, rng);
    if (independence_rank(params, ids, s).rank == 7) ++agree;
  }
  CHECK(agree >= 16);
}

TEST_CASE("independence rank, full system: linear dependencies collapse the rank") {
  const SystemParams params = testutil::make_params(2, {1, 2}, {0.5, 0.5});
  Rng rng(mix_seed(9, 0x77));
  const FullState s = sample_full_state(params, rng);

  // EFull is eta/2: rank 1.
  const RankResult r1 =
      independence_rank(params, {{Tag::Eta, 1, 0}, {Tag::EFull, 1, 0}}, s);
  CHECK(r1.rank == 1);

  // HFull = (eta_1 + eta_2)/2: rank 2.
  const RankResult r2 = independence_rank(
      params, {{Tag::Eta, 1, 0}, {Tag::Eta, 2, 0}, {Tag::HFull, 0, 0}}, s);
  CHECK(r2.rank == 2);

  // Angular momentum is independent of the plane energy at a generic state.
  const RankResult r3 =
      independence_rank(params, {{Tag::Eta, 1, 0}, {Tag::L, 1, 2}}, s);
  CHECK(r3.rank == 2);
}

TEST_CASE("period estimate: the projected radius of a planar orbit recurs at half the "
          "signed-coordinate period") {
  const SystemParams params = testutil::make_params(1, {1}, {0.0});

  // Generic elliptical orbit in the plane: the radius r(t) has period pi.
  FullState f0;
  f0.t = 0.0;
  f0.y = {1.0, 0.0};
  f0.phat = {0.3, 0.8};
  const Trajectory full =
      integrate(params, f0, 1e-4 * kTwoPi, 1.2 * kTwoPi, Method::Yoshida4);
  const Trajectory radial = reduce_trajectory(params, full);

  const auto est = period_estimate(params, radial, kClosureTol);
  REQUIRE(est.has_value());
  CHECK(std::abs(est->T_star - kPi) < 1e-5);
  CHECK(est->closure < 1e-6);

  // The signed reduced coordinate (k = 0 line motion through the axis) only
  // recurs after the doubled period 2 pi.
  ReducedState r0;
  r0.t = 0.0;
  r0.x = {1.4};
  r0.p = {0.3};
  const Trajectory signed_traj =
      integrate(params, r0, 1e-4 * kTwoPi, 2.2 * kTwoPi, Method::Yoshida4);
  const auto est_signed = period_estimate(params, signed_traj, kClosureTol);
  REQUIRE(est_signed.has_value());
  CHECK(std::abs(est_signed->T_star - kTwoPi) < 1e-4);
}

TEST_CASE("period estimate: a generic full-system orbit closes on the common period") {
  const SystemParams params = testutil::make_params(2, {1, 2}, {0.0, 0.0});
  Rng rng(3);
  const FullState s0 = sample_full_state(params, rng);
  const Trajectory traj =
      integrate(params, s0, 1e-4 * kTwoPi, 2.2 * kTwoPi, Method::Yoshida4);

  const auto est = period_estimate(params, traj, kClosureTol);
  REQUIRE(est.has_value());
  CHECK(est->closure < kClosureTol);
  const int divisor = static_cast<int>(std::lround(kTwoPi / est->T_star));
  CHECK(divisor >= 1);
  CHECK(std::abs(kTwoPi - divisor * est->T_star) <= 1e-4 * kTwoPi);
}

TEST_CASE("period estimate: commensurate reduced system closes tightly on a divisor of pi") {
  const SystemParams params = testutil::make_params(2, {2, 3}, {0.4, 0.9});
  Rng rng(11);
  const ReducedState s0 = sample_reduced_state(params, rng);
  // Radial periods pi/2 and pi/3 synchronize at pi.
  const Trajectory traj = integrate(params, s0, 1e-4, 2.2 * kPi, Method::Yoshida4);

  // The recurrence falls between samples (pi is not a multiple of dt), so the
  // nearest sample sits ~speed*dt/2 from the start — the detection ball must
  // cover that. The refined closure is far tighter than the detection radius.
  const auto est = period_estimate(params, traj, 1e-2);
  REQUIRE(est.has_value());
  CHECK(est->closure < 1e-5);
  const int divisor = static_cast<int>(std::lround(kPi / est->T_star));
  CHECK(divisor >= 1);
  CHECK(std::abs(kPi - divisor * est->T_star) <= 1e-4 * kPi);
}

TEST_CASE("period estimate: absent when the trajectory never re-enters the closure ball") {
  const SystemParams params = testutil::make_params(1, {1}, {1.0});
  const ReducedState s0 = radial_turning_state(params, turning_amplitudes(1));

  // The radial period is pi; a window of 0.45 pi leaves the ball and ends
  // before the return.
  const Trajectory too_short =
      integrate(params, s0, 1e-4 * kTwoPi, 0.45 * kPi, Method::Yoshida4);
  CHECK_FALSE(period_estimate(params, too_short, kClosureTol).has_value());

  // Fewer than three samples can never bracket a dip.
  const Trajectory tiny = integrate(params, s0, 1e-3, 1e-3, Method::Yoshida4);
  CHECK_FALSE(period_estimate(params, tiny, kClosureTol).has_value());
}

TEST_CASE("integral sets enumerate the claimed 2N-1 members in a fixed order") {
  const SystemParams params = testutil::make_params(3, {1, 2, 3}, {0.5, 0.5, 0.5});

  const std::vector<IntegralId> reduced = reduced_integral_set(params);
  REQUIRE(reduced.size() == 5);
  CHECK(to_string(reduced[0]) == "EReduced(1)");
  CHECK(to_string(reduced[1]) == "EReduced(2)");
  CHECK(to_string(reduced[2]) == "EReduced(3)");
  CHECK(to_string(reduced[3]) == "R(1)");
  CHECK(to_string(reduced[4]) == "R(2)");

  const std::vector<IntegralId> full = full_integral_set(params);
  REQUIRE(full.size() == 5);
  CHECK(to_string(full[0]) == "Eta(1)");
  CHECK(to_string(full[1]) == "Eta(2)");
  CHECK(to_string(full[2]) == "Eta(3)");
  CHECK(to_string(full[3]) == "QFull(1)");
  CHECK(to_string(full[4]) == "QFull(2)");

  const SystemParams single = testutil::make_params(1, {1}, {1.0});
  CHECK(reduced_integral_set(single).size() == 1);
  CHECK(full_integral_set(single).size() == 1);
}

TEST_CASE("momentum degree estimate matches the polynomial structure of each integral") {
  const SystemParams params = testutil::make_params(2, {1, 2}, {0.7, 1.3});

  ReducedState rs;
  rs.t = 0.0;
  rs.x = {1.1, 0.8};
  rs.p = {0.6, -0.4};
  CHECK(momentum_degree_estimate(params, {Tag::EReduced, 1, 0}, rs) == 2);
  CHECK(momentum_degree_estimate(params, {Tag::HReduced, 0, 0}, rs) == 2);
  CHECK(momentum_degree_estimate(params, {Tag::IMod, 1, 0}, rs) == 4);
  // Products of plane factors: degree 2(n_1 + n_2) = 6.
  CHECK(momentum_degree_estimate(params, {Tag::R, 1, 0}, rs) == 6);
  CHECK(momentum_degree_estimate(params, {Tag::QReduced, 1, 0}, rs) == 6);

  FullState fs;
  fs.t = 0.0;
  fs.y = {0.9, 0.4, 0.7, -0.3};
  fs.phat = {0.5, -0.6, 0.8, 0.2};
  CHECK(momentum_degree_estimate(params, {Tag::L, 1, 2}, fs) == 1);
  CHECK(momentum_degree_estimate(params, {Tag::T, 1, 2}, fs) == 2);
  CHECK(momentum_degree_estimate(params, {Tag::Eta, 1, 0}, fs) == 2);
  CHECK(momentum_degree_estimate(params, {Tag::Xi, 1, 0}, fs) == 2);
  CHECK(momentum_degree_estimate(params, {Tag::HFull, 0, 0}, fs) == 2);
  // c_jk = z_j^{n(k)} conj(z_k)^{n(j)}: degree n(k) + n(j) = 2 + 1 = 3.
  CHECK(momentum_degree_estimate(params, {Tag::C, 1, 3}, fs) == 3);
  // QFull is built from degree-2 plane sums: 2(n_1 + n_2) = 6.
  CHECK(momentum_degree_estimate(params, {Tag::QFull, 1, 0}, fs) == 6);

  // A probe that vanishes identically under momentum dilation is rejected.
  FullState dead;
  dead.t = 0.0;
  dead.y = {1.0, 0.0, 0.5, 0.0};
  dead.phat = {0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(momentum_degree_estimate(params, {Tag::L, 1, 2}, dead), ConfigError);
}

TEST_CASE("turning amplitudes and the turning-surface start state") {
  CHECK(turning_amplitudes(1) == std::vector<double>{1.3});
  CHECK(turning_amplitudes(2) == std::vector<double>{1.3, 1.2});
  CHECK(turning_amplitudes(3).size() == 3);
  const std::vector<double> amps7 = turning_amplitudes(7);
  REQUIRE(amps7.size() == 7);
  for (double a : amps7) {
    CHECK(a > 1.0);
    CHECK(a <= 1.3);
  }

  const SystemParams params = testutil::make_params(2, {1, 2}, {1.0, 0.0}, 2.0);
  const ReducedState s = radial_turning_state(params, turning_amplitudes(2));
  CHECK(s.t == 0.0);
  REQUIRE(s.x.size() == 2);
  REQUIRE(s.p.size() == 2);
  CHECK(s.p[0] == 0.0);
  CHECK(s.p[1] == 0.0);
  // k > 0 plane: amplitude times the circular-orbit radius (k/(n w)^2)^(1/4).
  CHECK(s.x[0] == doctest::Approx(1.3 * std::pow(0.25, 0.25)).epsilon(1e-12));
  // k = 0 plane: amplitude times the oscillator length 1/sqrt(n w).
  CHECK(s.x[1] == doctest::Approx(1.2 / 2.0).epsilon(1e-12));

  CHECK_THROWS_AS(radial_turning_state(params, {1.3}), ConfigError);
}

TEST_CASE("verification driver: the documented parameter point passes every suite") {
  const SystemParams params = testutil::make_params(2, {1, 2}, {1.0, 0.0});
  SuiteConfig cfg;
  cfg.flags.reduce_check = true;
  cfg.seed = 1;

  const VerificationReport report = run_verification(params, cfg);
  CHECK(report.pass);
  CHECK(report.error.empty());
  CHECK(report.seed == 1);

  REQUIRE(report.conservation.has_value());
  REQUIRE(report.conservation->entries.size() == 4);  // E1, E2, R(1), HReduced
  CHECK(report.conservation->all_conserved_ok);
  for (const auto& entry : report.conservation->entries) {
    CAPTURE(to_string(entry.id));
    CHECK(entry.max_rel_drift < kDriftTol);
  }

  REQUIRE(report.brackets.has_value());
  CHECK(report.brackets->all_pass);
  CHECK(report.brackets->samples == 100);
  CHECK(report.brackets->seed == mix_seed(1, 0xb7ac));
  // (H, E1), (H, E2), (H, R1) plus the energy pair (E1, E2).
  CHECK(report.brackets->pairs.size() == 4);

  REQUIRE(report.rank.has_value());
  CHECK(report.rank->expected == 3);
  CHECK(report.rank->majority_rank == 3);
  CHECK(report.rank->agree_fraction >= kRankVoteFraction);
  CHECK(report.rank->pass);
  CHECK(report.rank->example_singular_values.size() == 3);

  REQUIRE(report.period.has_value());
  CHECK(report.period->found);
  // One k = 0 plane: the radial recurrence bound is 2 pi / omega, and the
  // k > 0 plane synchronizes with it after half that, so T* = pi.
  CHECK(report.period->bound == doctest::Approx(kTwoPi).epsilon(1e-12));
  CHECK(report.period->divisor == 2);
  CHECK(report.period->closure < kClosureTol);
  CHECK(std::abs(report.period->bound - report.period->divisor * report.period->T_star) <=
        kPeriodDivisorTol * report.period->bound);
  CHECK(report.period->pass);

  REQUIRE(report.reduce_check.has_value());
  CHECK(report.reduce_check->max_dev < kConsistencyTol);
  CHECK(report.reduce_check->method == Method::Yoshida4);
  // The k = 0 plane crosses the axis, so the comparison window is truncated.
  CHECK(report.reduce_check->truncated);

  // The whole driver is deterministic in (params, cfg).
  const VerificationReport again = run_verification(params, cfg);
  CHECK(to_json(report).dump() == to_json(again).dump());
}

TEST_CASE("verification driver: corrupted evaluation parameters break conservation but "
          "not the internally consistent suites") {
  const SystemParams params = testutil::make_params(2, {1, 2}, {1.0, 0.0});
  SystemParams wrong = params;
  wrong.k[0] = 1.02;  // 2% corruption of one coupling

  SuiteConfig cfg;
  cfg.flags.period = false;  // period inspects the trajectory only
  cfg.seed = 1;

  const VerificationReport report = run_verification(params, cfg, &wrong);
  CHECK_FALSE(report.pass);

  // Integrals evaluated with the wrong k1 are not constant along the true
  // flow; the untouched plane stays clean.
  REQUIRE(report.conservation.has_value());
  CHECK_FALSE(report.conservation->all_conserved_ok);
  for (const auto& entry : report.conservation->entries) {
    CAPTURE(to_string(entry.id));
    if (entry.id == IntegralId{Tag::EReduced, 1, 0})
      CHECK(entry.max_rel_drift > 1e-4);
    if (entry.id == IntegralId{Tag::EReduced, 2, 0})
      CHECK(entry.max_rel_drift < kDriftTol);
  }

  // The corrupted family is still a mutually commuting, independent set, so
  // brackets and rank cannot see the corruption — only conservation can.
  REQUIRE(report.brackets.has_value());
  CHECK(report.brackets->all_pass);
  REQUIRE(report.rank.has_value());
  CHECK(report.rank->pass);
}

TEST_CASE("survey: per-point seeds are index-stable, errors are captured, and the batch "
          "is deterministic") {
  const SystemParams good = testutil::make_params(2, {1, 2}, {1.0, 0.0});
  const SystemParams bad = testutil::make_params(1, {1}, {-0.5});  // lift rejects k < 0

  SuiteConfig cfg;
  cfg.flags = SuiteFlags{/*conservation=*/false, /*brackets=*/false, /*rank=*/false,
                         /*period=*/false, /*reduce_check=*/true};
  cfg.seed = 42;

  const std::vector<SystemParams> points{good, bad};
  const std::vector<VerificationReport> out = survey(points, cfg, 2);
  REQUIRE(out.size() == 2);

  CHECK(out[0].pass);
  CHECK(out[0].error.empty());
  CHECK(out[0].seed == mix_seed(42, 0));
  REQUIRE(out[0].reduce_check.has_value());
  CHECK(out[0].reduce_check->max_dev < kConsistencyTol);

  CHECK_FALSE(out[1].pass);
  CHECK_FALSE(out[1].error.empty());
  CHECK(out[1].seed == mix_seed(42, 1));

  // Same config, different thread count: byte-identical reports.
  const std::vector<VerificationReport> serial = survey(points, cfg, 1);
  REQUIRE(serial.size() == 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    CHECK(to_json(out[i]).dump() == to_json(serial[i]).dump());
}

TEST_CASE("verification report serializes with the documented field layout") {
  const SystemParams params = testutil::make_params(2, {1, 2}, {1.0, 0.0});
  SuiteConfig cfg;
  cfg.flags.reduce_check = true;
  cfg.seed = 7;

  const nlohmann::json j = to_json(run_verification(params, cfg));

  REQUIRE(j.contains("params"));
  CHECK(j["params"]["N"] == 2);
  CHECK(j["params"]["n"] == std::vector<int>{1, 2});
  CHECK(j["params"]["k"] == std::vector<double>{1.0, 0.0});
  CHECK(j["params"]["omega"] == 1.0);
  CHECK(j["params"].size() == 4);

  CHECK(j["seed"] == 7);
  CHECK(j["pass"] == true);
  CHECK_FALSE(j.contains("error"));

  REQUIRE(j.contains("conservation"));
  const auto& integrals = j["conservation"]["integrals"];
  REQUIRE(integrals.is_array());
  REQUIRE(integrals.size() == 4);
  for (const auto& entry : integrals) {
    CHECK(entry.size() == 3);
    CHECK(entry.contains("id"));
    CHECK(entry["id"].is_string());
    CHECK(entry.contains("conserved"));
    CHECK(entry["conserved"] == true);
    CHECK(entry.contains("max_rel_drift"));
    CHECK(entry["max_rel_drift"].is_number());
  }
  CHECK(integrals[0]["id"] == "EReduced(1)");
  CHECK(j["conservation"]["all_conserved_ok"] == true);

  REQUIRE(j.contains("brackets"));
  CHECK(j["brackets"]["all_pass"] == true);
  REQUIRE(j.contains("rank"));
  CHECK(j["rank"]["expected"] == 3);
  CHECK(j["rank"]["majority_rank"] == 3);
  CHECK(j["rank"]["pass"] == true);
  REQUIRE(j.contains("period"));
  CHECK(j["period"]["found"] == true);
  CHECK(j["period"]["divisor"] == 2);
  CHECK(j["period"]["pass"] == true);
  REQUIRE(j.contains("reduce_check"));
  CHECK(j["reduce_check"].contains("max_dev"));
  CHECK(j["reduce_check"]["method"] == "Yoshida4");
  CHECK(j["reduce_check"].contains("truncated_at"));
}

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cobeam/centralized.hpp"
#include "cobeam/distributed.hpp"
#include "cobeam/model.hpp"

using namespace cobeam;

namespace {

// Independent reimplementation of V(theta) used as the oracle for the
// subgradient finite-difference checks.
Real value_oracle(const ChannelSet& ch, const SystemConfig& cfg,
                  const InterferenceAllocation& alloc) {
  const auto v = allocation_value(ch, cfg, alloc);
  REQUIRE(v.has_value());
  return *v;
}

}  // namespace

TEST_CASE("interference pairs enumerate non-serving BSs in canonical order") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 2, 1.0);
  const auto pairs = interference_pairs(cfg);
  // Users 0,1 are served by BS0 and users 2,3 by BS1.
  const std::vector<std::pair<int, int>> expected = {
      {0, 2}, {0, 3}, {1, 0}, {1, 1}};
  REQUIRE(pairs == expected);

  const InterferenceAllocation alloc = initial_allocation(cfg);
  REQUIRE(alloc.theta.rows() == 2);
  REQUIRE(alloc.theta.cols() == 4);
  for (const auto& [b, u] : pairs)
    REQUIRE(alloc.theta(b, u) == Catch::Approx(1.0));  // gamma * sigma^2
  REQUIRE(alloc.theta(0, 0) == 0.0);  // serving entries stay zero
}

TEST_CASE("per-BS subproblem has served rows then cap rows") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 3, 2.0, 0.5);
  const ChannelSet ch = generate_channels(cfg, 1);
  InterferenceAllocation alloc = initial_allocation(cfg);
  alloc.theta(1, 0) = 0.3;  // BS1's cap toward user 0 feeds BS0's rhs

  const SdpProblem prob = build_bs_subproblem(local_view(ch, 0), cfg, alloc);
  REQUIRE(prob.block_dims == std::vector<int>{3});  // one owned group
  REQUIRE(prob.constraints.size() == 4);            // 2 served + 2 capped

  // Served rows: sense >=, rhs = gamma * (sigma^2 + incoming allowance).
  REQUIRE(prob.constraints[0].sense == Sense::GreaterEqual);
  REQUIRE(prob.constraints[0].rhs == Catch::Approx(2.0 * (0.5 + 0.3)));
  REQUIRE(prob.constraints[1].rhs ==
          Catch::Approx(2.0 * (0.5 + 2.0 * 0.5)));  // untouched theta0
  // Cap rows: sense <=, rhs = own cap toward that user.
  REQUIRE(prob.constraints[2].sense == Sense::LessEqual);
  REQUIRE(prob.constraints[2].rhs == Catch::Approx(alloc.theta(0, 2)));
  REQUIRE(prob.constraints[3].rhs == Catch::Approx(alloc.theta(0, 3)));
}

TEST_CASE("subproblem result depends only on the BS's own channels") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 4, 1.0);
  const ChannelSet ch = generate_channels(cfg, 7);
  ChannelSet corrupted = ch;
  corrupted.h[1] = generate_channels(cfg, 999).h[1];  // other BS's rows

  const InterferenceAllocation alloc = initial_allocation(cfg);
  const BsSubproblemResult a =
      solve_bs_subproblem(local_view(ch, 0), cfg, alloc);
  const BsSubproblemResult b =
      solve_bs_subproblem(local_view(corrupted, 0), cfg, alloc);
  REQUIRE(solve_ok(a.status));
  REQUIRE(a.objective == b.objective);  // bitwise: identical inputs
  REQUIRE(a.lambda == b.lambda);
  REQUIRE(a.mu == b.mu);
}

TEST_CASE("sensitivities are nonnegative and a slack cap has zero price") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 4, 1.0);
  const ChannelSet ch = generate_channels(cfg, 2);
  InterferenceAllocation alloc = initial_allocation(cfg);
  for (const auto& [b, u] : interference_pairs(cfg))
    alloc.theta(b, u) = 1e6;  // caps far beyond any useful interference

  const BsSubproblemResult r =
      solve_bs_subproblem(local_view(ch, 0), cfg, alloc);
  REQUIRE(solve_ok(r.status));
  for (const auto& [u, lam] : r.lambda) REQUIRE(lam >= 0.0);
  for (const auto& [u, mu] : r.mu) {
    REQUIRE(mu >= 0.0);
    REQUIRE(mu <= 1e-7);  // a cap nobody can reach is worthless
  }
}

TEST_CASE("loosening caps can only help the capped BS and hurt the server") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 4, 1.5);
  const ChannelSet ch = generate_channels(cfg, 3);
  const InterferenceAllocation base = initial_allocation(cfg);

  const Real f0 = solve_bs_subproblem(local_view(ch, 0), cfg, base).objective;

  SECTION("doubling BS0's own outgoing cap relaxes its problem") {
    InterferenceAllocation loose = base;
    loose.theta(0, 2) *= 2.0;
    const Real f0_loose =
        solve_bs_subproblem(local_view(ch, 0), cfg, loose).objective;
    REQUIRE(f0_loose <= f0 + 1e-8 * (1 + std::abs(f0)));
  }

  SECTION("doubling the allowance granted to BS1 tightens BS0's rows") {
    InterferenceAllocation granted = base;
    granted.theta(1, 0) *= 2.0;  // more interference allowed onto user 0
    const Real f0_tight =
        solve_bs_subproblem(local_view(ch, 0), cfg, granted).objective;
    REQUIRE(f0_tight >= f0 - 1e-8 * (1 + std::abs(f0)));
  }
}

TEST_CASE("master update follows the projected subgradient formula") {
  // theta' = max(theta - sigma * (lambda - mu), floor)
  REQUIRE(master_update(1.0, 0.3, 0.1, 0.5) == Catch::Approx(0.9));
  REQUIRE(master_update(2.5, 0.7, 0.7, 10.0) == Catch::Approx(2.5));
  REQUIRE(master_update(0.1, 10.0, 0.0, 0.5) == Catch::Approx(1e-10));
}

TEST_CASE("analytic subgradient matches finite differences of V(theta)") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 4, 1.0);
  for (std::uint64_t seed : {1000u, 1001u}) {
    const ChannelSet ch = generate_channels(cfg, seed);
    InterferenceAllocation alloc = initial_allocation(cfg);
    RngStream rng(seed);
    for (const auto& [b, u] : interference_pairs(cfg))
      alloc.theta(b, u) *= 0.5 + rng.uniform();  // generic interior point

    std::vector<BsSubproblemResult> subs;
    for (int b = 0; b < 2; ++b)
      subs.push_back(solve_bs_subproblem(local_view(ch, b), cfg, alloc));
    REQUIRE(solve_ok(subs[0].status));
    REQUIRE(solve_ok(subs[1].status));

    const auto pairs = interference_pairs(cfg);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto [b, u] = pairs[i];
      const Real analytic =
          subs[cfg.serving_bs(u)].lambda.at(u) - subs[b].mu.at(u);
      const Real d = 1e-5 * std::max(alloc.theta(b, u), 1.0);
      InterferenceAllocation up = alloc, dn = alloc;
      up.theta(b, u) += d;
      dn.theta(b, u) -= d;
      const Real fd =
          (value_oracle(ch, cfg, up) - value_oracle(ch, cfg, dn)) / (2 * d);
      REQUIRE(std::abs(analytic - fd) <=
              1e-2 * std::max(Real(1e-12), std::abs(fd)));
    }
  }
}

TEST_CASE("decoupled cells collapse to per-cell matched filtering") {
  // Zero cross-channels: every cap is worthless (mu = 0) while lambda
  // stays positive, so the caps sink to the floor and the relaxed value
  // approaches the sum of single-cell matched-filter powers.
  const SystemConfig cfg = make_uniform_config(2, 2, 2, 2, 2.0);
  ChannelSet ch = generate_channels(cfg, 5);
  ch.h[0][1].setZero();  // BS0 does not reach user 1
  ch.h[1][0].setZero();  // BS1 does not reach user 0

  Real expected = 0.0;
  for (int u = 0; u < 2; ++u)
    expected += 2.0 * 1.0 / ch.h[cfg.serving_bs(u)][u].squaredNorm();

  SubgradientSchedule sched;
  sched.max_rounds = 80;
  const DistributedResult res = run_distributed(ch, cfg, sched);
  REQUIRE(res.converged);
  REQUIRE(res.rounds_used <= 80);
  REQUIRE(res.relaxed_value == Catch::Approx(expected).epsilon(1e-5));
  REQUIRE(res.all_rank_one);
  REQUIRE(res.sum_power == Catch::Approx(expected).epsilon(1e-5));
  // Matched filter: recovered beam aligned with the serving channel.
  for (int u = 0; u < 2; ++u) {
    const CVector& h = ch.h[cfg.serving_bs(u)][u];
    const CVector& w = res.beams.w[cfg.user_group[u]];
    const Real align = std::abs(h.dot(w)) / (h.norm() * w.norm());
    REQUIRE(align == Catch::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("full run stays within half a percent of the centralized optimum") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 4, 1.0);
  const ChannelSet ch = generate_channels(cfg, 0);

  const CentralizedResult cen = solve_centralized(ch, cfg);
  const DistributedResult res = run_distributed(ch, cfg);

  REQUIRE(res.converged);
  REQUIRE(res.rounds_used <= 200);
  REQUIRE(std::abs(res.relaxed_value - cen.lower_bound) <=
          0.005 * cen.lower_bound);
  // The decomposed value can never undercut the centralized relaxation.
  REQUIRE(res.relaxed_value >= cen.lower_bound - 1e-6 * cen.lower_bound);

  SECTION("recovered beams meet every SINR target network-wide") {
    for (int u = 0; u < cfg.num_users; ++u)
      REQUIRE(evaluate_sinr(ch, res.beams, cfg, u) >=
              cfg.sinr_target[u] * (1 - 1e-6));
  }

  SECTION("recovered beams respect the final interference caps") {
    for (const auto& [b, u] : interference_pairs(cfg)) {
      Real interference = 0.0;
      for (int g : cfg.groups_of(b))
        interference += std::norm(ch.h[b][u].dot(res.beams.w[g]));
      REQUIRE(interference <=
              res.theta.theta(b, u) + 1e-6 * (1 + res.theta.theta(b, u)));
    }
  }

  SECTION("every iterative round exchanges exactly 2U(B-1) scalars") {
    const SignalingLoad load =
        signaling_load(cfg.num_bs, cfg.num_antennas, cfg.num_users);
    for (int r = 0; r < res.rounds_used; ++r) {
      REQUIRE(res.backhaul.count(r, MessageKind::SinrDual) +
                  res.backhaul.count(r, MessageKind::CapDual) ==
              static_cast<std::size_t>(load.distributed_per_round));
      REQUIRE(res.backhaul.count(r, MessageKind::RankBit) == 0);
      REQUIRE(res.backhaul.count(r, MessageKind::RandPower) == 0);
    }
    // Recovery phase: one rank bit per BS, candidate powers only when the
    // recovery actually randomized.
    REQUIRE(res.backhaul.count(res.rounds_used, MessageKind::RankBit) ==
            static_cast<std::size_t>(cfg.num_bs));
    const std::size_t rp =
        res.backhaul.count(res.rounds_used, MessageKind::RandPower);
    if (res.randomized)
      REQUIRE(rp > 0);
    else
      REQUIRE(rp == 0);
  }

  SECTION("the trace records one entry per solved round") {
    REQUIRE(static_cast<int>(res.trace.size()) == res.rounds_used);
    REQUIRE(res.trace.back().sum_power ==
            Catch::Approx(res.relaxed_value));
    REQUIRE(res.trace.back().theta_rel_change <= 1e-4);
  }
}

TEST_CASE("fixed caps solve exactly one round") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 4, 1.0);
  const ChannelSet ch = generate_channels(cfg, 0);
  PolicySpec policy;
  policy.kind = CapPolicy::Fixed;

  const DistributedResult res = run_distributed(ch, cfg, {}, policy);
  REQUIRE(res.rounds_used == 1);
  REQUIRE(res.converged);
  for (const auto& [b, u] : interference_pairs(cfg))
    REQUIRE(res.theta.theta(b, u) ==
            Catch::Approx(cfg.sinr_target[u] * cfg.noise_var[u]));

  PolicySpec custom;
  custom.kind = CapPolicy::Fixed;
  custom.fixed_cap = 0.25;
  const DistributedResult res2 = run_distributed(ch, cfg, {}, custom);
  for (const auto& [b, u] : interference_pairs(cfg))
    REQUIRE(res2.theta.theta(b, u) == Catch::Approx(0.25));
  REQUIRE(res2.sum_power >= res.relaxed_value * 0.0);  // runs to completion
}

TEST_CASE("a common cap stays scalar across all pairs") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 4, 1.0);
  const ChannelSet ch = generate_channels(cfg, 0);
  PolicySpec policy;
  policy.kind = CapPolicy::Common;

  const DistributedResult res = run_distributed(ch, cfg, {}, policy);
  const auto pairs = interference_pairs(cfg);
  const Real first = res.theta.theta(pairs[0].first, pairs[0].second);
  for (const auto& [b, u] : pairs)
    REQUIRE(res.theta.theta(b, u) == Catch::Approx(first));
  for (int u = 0; u < cfg.num_users; ++u)
    REQUIRE(evaluate_sinr(ch, res.beams, cfg, u) >=
            cfg.sinr_target[u] * (1 - 1e-6));
}

TEST_CASE("nulling transmits strictly inside the out-of-cell null space") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 4, 1.0);
  const ChannelSet ch = generate_channels(cfg, 0);
  PolicySpec policy;
  policy.kind = CapPolicy::Nulling;

  const DistributedResult res = run_distributed(ch, cfg, {}, policy);
  REQUIRE(res.backhaul.total() == 0);  // no coordination at all
  REQUIRE(res.rounds_used == 1);
  for (const auto& [b, u] : interference_pairs(cfg)) {
    Real leak = 0.0;
    for (int g : cfg.groups_of(b))
      leak += std::norm(ch.h[b][u].dot(res.beams.w[g]));
    REQUIRE(leak <= 1e-12 * (1 + res.sum_power));
  }
  for (int u = 0; u < cfg.num_users; ++u)
    REQUIRE(evaluate_sinr(ch, res.beams, cfg, u) >=
            cfg.sinr_target[u] * (1 - 1e-6));

  SECTION("zero-forcing can never beat the coordinated optimum") {
    const CentralizedResult cen = solve_centralized(ch, cfg);
    REQUIRE(res.sum_power >= cen.lower_bound - 1e-9 * cen.lower_bound);
  }

  SECTION("single-antenna interferers have no null space to hide in") {
    const SystemConfig tiny = make_uniform_config(2, 2, 2, 1, 1.0);
    const ChannelSet tch = generate_channels(tiny, 0);
    REQUIRE_THROWS_AS(run_distributed(tch, tiny, {}, policy),
                      InfeasibleError);
  }
}

TEST_CASE("jointly unattainable targets fail fast at the starting caps") {
  // Two scalar cells with unit gains at gamma = 1 admit no solution at all,
  // and the starting caps expose it in the very first round.
  const SystemConfig cfg = make_uniform_config(2, 2, 2, 1, 1.0);
  ChannelSet ch;
  ch.h.assign(2, std::vector<CVector>(2, CVector::Ones(1)));
  REQUIRE_THROWS_AS(run_distributed(ch, cfg), InfeasibleError);
}

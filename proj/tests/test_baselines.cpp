// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cobeam/baselines.hpp"
#include "cobeam/centralized.hpp"
#include "cobeam/model.hpp"

using namespace cobeam;

TEST_CASE("slot targets follow the rate-equivalence boost") {
  // gamma' = (1 + gamma)^B - 1
  REQUIRE(orthogonal_target(1.0, 2) == Catch::Approx(3.0));
  REQUIRE(orthogonal_target(1.0, 4) == Catch::Approx(15.0));
  REQUIRE(orthogonal_target(2.0, 3) == Catch::Approx(26.0));
  REQUIRE(orthogonal_target(0.5, 1) == Catch::Approx(0.5));  // no boost
}

TEST_CASE("a single cell gets no boost and no slot split") {
  const SystemConfig cfg = make_uniform_config(1, 2, 4, 4, 1.5);
  const ChannelSet ch = generate_channels(cfg, 4);

  const BaselineResult orth = orthogonal_access(ch, cfg);
  const CentralizedResult cen = solve_centralized(ch, cfg);
  REQUIRE(orth.feasible);
  REQUIRE(orth.sum_power == Catch::Approx(cen.achieved_power).epsilon(1e-9));
  REQUIRE(orth.sum_power_alt == Catch::Approx(orth.sum_power).epsilon(1e-12));
}

TEST_CASE("scalar two-cell orthogonal access has a closed form") {
  // Unit channels, one user per cell, gamma = 1: each slot needs
  // gamma' * sigma^2 / |h|^2 = 3, so the slot sum is 6 and the time
  // average is 3.
  const SystemConfig cfg = make_uniform_config(2, 2, 2, 1, 1.0);
  ChannelSet ch;
  ch.h.assign(2, std::vector<CVector>(2, CVector::Ones(1)));

  const BaselineResult orth = orthogonal_access(ch, cfg);
  REQUIRE(orth.feasible);
  REQUIRE(orth.per_cell[0] == Catch::Approx(3.0).epsilon(1e-6));
  REQUIRE(orth.per_cell[1] == Catch::Approx(3.0).epsilon(1e-6));
  REQUIRE(orth.sum_power == Catch::Approx(3.0).epsilon(1e-6));
  REQUIRE(orth.sum_power_alt == Catch::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("orthogonal beams meet the boosted targets inside their own slot") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 4, 2.0);
  const ChannelSet ch = generate_channels(cfg, 8);
  const BaselineResult orth = orthogonal_access(ch, cfg);
  REQUIRE(orth.feasible);

  // In its slot a cell transmits alone, so each served user's SINR is the
  // single-cell one against the boosted target.
  const Real boosted = orthogonal_target(2.0, 2);
  for (int u = 0; u < cfg.num_users; ++u) {
    const int b = cfg.serving_bs(u);
    const int g = cfg.user_group[u];
    Real interference = 0.0;
    for (int k : cfg.groups_of(b))
      if (k != g) interference += std::norm(ch.h[b][u].dot(orth.beams.w[k]));
    const Real sinr = std::norm(ch.h[b][u].dot(orth.beams.w[g])) /
                      (cfg.noise_var[u] + interference);
    REQUIRE(sinr >= boosted * (1 - 1e-6));
  }
}

TEST_CASE("nulling baseline wraps the nulling policy verbatim") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 4, 1.0);
  const ChannelSet ch = generate_channels(cfg, 0);

  PolicySpec policy;
  policy.kind = CapPolicy::Nulling;
  const DistributedResult direct = run_distributed(ch, cfg, {}, policy);
  const BaselineResult base = interference_nulling(ch, cfg);

  REQUIRE(base.feasible);
  REQUIRE(base.sum_power == Catch::Approx(direct.sum_power).epsilon(1e-12));
  REQUIRE(base.sum_power_alt == Catch::Approx(base.sum_power));
  Real cells = 0.0;
  for (Real p : base.per_cell) cells += p;
  REQUIRE(cells == Catch::Approx(base.sum_power).epsilon(1e-12));
}

TEST_CASE("insufficient antennas make nulling infeasible, not fatal") {
  const SystemConfig cfg = make_uniform_config(2, 2, 2, 1, 1.0);
  const ChannelSet ch = generate_channels(cfg, 0);
  const BaselineResult base = interference_nulling(ch, cfg);
  REQUIRE_FALSE(base.feasible);
  REQUIRE(std::isnan(base.sum_power));

  // The orthogonal scheme shrugs: in its own slot one antenna suffices.
  const BaselineResult orth = orthogonal_access(ch, cfg);
  REQUIRE(orth.feasible);
}

TEST_CASE("coordination is never worse than either baseline at a high target") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 4, db_to_linear(10.0));
  for (std::uint64_t seed : {1u, 2u}) {
    const ChannelSet ch = generate_channels(cfg, seed);
    const CentralizedResult cen = solve_centralized(ch, cfg);
    const BaselineResult nul = interference_nulling(ch, cfg);
    const BaselineResult orth = orthogonal_access(ch, cfg);
    if (nul.feasible)
      REQUIRE(cen.achieved_power <= nul.sum_power * (1 + 1e-9));
    if (orth.feasible)
      REQUIRE(cen.achieved_power <= orth.sum_power * (1 + 1e-9));
  }
}

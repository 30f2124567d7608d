// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors

#include <catch2/catch_amalgamated.hpp>

#include "cobeam/backhaul.hpp"

using namespace cobeam;

TEST_CASE("per-round and total signaling loads match the closed forms") {
  // (B, A, U) -> centralized 2*A*U*B*(B-1), distributed 2*U*(B-1) per round.
  struct Row {
    int B, A, U;
    long long centralized, per_round;
  };
  const Row rows[] = {
      {2, 8, 8, 256, 16},
      {3, 12, 12, 1728, 48},
      {4, 16, 16, 6144, 96},
  };
  for (const Row& r : rows) {
    const SignalingLoad load = signaling_load(r.B, r.A, r.U);
    REQUIRE(load.centralized_scalars == r.centralized);
    REQUIRE(load.distributed_per_round == r.per_round);
  }

  SECTION("a single cell never signals") {
    const SignalingLoad load = signaling_load(1, 4, 4);
    REQUIRE(load.centralized_scalars == 0);
    REQUIRE(load.distributed_per_round == 0);
  }
}

TEST_CASE("uneven user splits are rejected") {
  REQUIRE_THROWS_AS(signaling_load(3, 8, 8), std::invalid_argument);
  REQUIRE_THROWS_AS(signaling_load(0, 8, 8), std::invalid_argument);
  REQUIRE_THROWS_AS(signaling_load(2, 0, 4), std::invalid_argument);
}

TEST_CASE("log counting helpers slice by round and kind") {
  BackhaulLog log;
  log.records.push_back({0, MessageKind::SinrDual, 0, 1, 2, -1, 0.5});
  log.records.push_back({0, MessageKind::CapDual, 1, 0, 2, -1, 0.25});
  log.records.push_back({1, MessageKind::SinrDual, 0, 1, 2, -1, 0.4});
  log.records.push_back({2, MessageKind::RankBit, 0, -1, -1, -1, 1.0});
  log.records.push_back({2, MessageKind::RandPower, 0, -1, -1, 7, 3.5});

  REQUIRE(log.total() == 5);
  REQUIRE(log.count_round(0) == 2);
  REQUIRE(log.count_round(1) == 1);
  REQUIRE(log.count(0, MessageKind::SinrDual) == 1);
  REQUIRE(log.count(2, MessageKind::RandPower) == 1);
  REQUIRE(log.count_kind(MessageKind::SinrDual) == 2);
  REQUIRE(std::string(to_string(MessageKind::CapDual)) == "cap_dual");
}

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
//
// Simulated backhaul: every scalar a BS sends to its peers during the
// distributed optimization is logged as one record, so tests and experiment
// reports can count signaling load exactly.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cobeam/types.hpp"

namespace cobeam {

/// What a backhaul scalar carries.
///  - SinrDual: serving BS tells every other BS the sensitivity of a served
///    user's SINR constraint (one per served user and peer, each round).
///  - CapDual: an interfering BS tells the serving BS the sensitivity of its
///    interference cap for that user (one per out-of-cell pair, each round).
///  - RankBit: post-convergence broadcast of "all my blocks are rank one".
///  - RandPower: post-convergence broadcast of one candidate's local power
///    (negative value = candidate locally infeasible).
enum class MessageKind { SinrDual, CapDual, RankBit, RandPower };

inline const char* to_string(MessageKind k) {
  switch (k) {
    case MessageKind::SinrDual: return "sinr_dual";
    case MessageKind::CapDual: return "cap_dual";
    case MessageKind::RankBit: return "rank_bit";
    case MessageKind::RandPower: return "rand_power";
  }
  return "unknown";
}

/// One scalar crossing the backhaul. receiver == -1 means broadcast to all
/// other BSs (counted as one record). user/candidate are -1 when the kind
/// does not carry them.
struct BackhaulRecord {
  int round = 0;
  MessageKind kind = MessageKind::SinrDual;
  int sender = 0;
  int receiver = -1;
  int user = -1;
  int candidate = -1;
  Real value = 0.0;
};

struct BackhaulLog {
  std::vector<BackhaulRecord> records;

  std::size_t total() const { return records.size(); }

  std::size_t count_round(int round) const {
    std::size_t n = 0;
    for (const auto& r : records) n += (r.round == round);
    return n;
  }

  std::size_t count(int round, MessageKind kind) const {
    std::size_t n = 0;
    for (const auto& r : records) n += (r.round == round && r.kind == kind);
    return n;
  }

  std::size_t count_kind(MessageKind kind) const {
    std::size_t n = 0;
    for (const auto& r : records) n += (r.kind == kind);
    return n;
  }
};

/// Closed-form signaling load for a network of B cells, A antennas and U
/// users (U/B per cell).
///  - Centralized: full CSI sharing. Every BS forwards its local channels
///    (U vectors of A complex entries = 2*A*U real scalars) to each of the
///    B-1 other BSs once per coherence block: 2*A*U*B*(B-1) scalars.
///  - Distributed: per round, each user's SINR sensitivity travels from its
///    serving BS to the B-1 others and each of the B-1 interfering BSs
///    returns one cap sensitivity: 2*U*(B-1) scalars per round.
struct SignalingLoad {
  long long centralized_scalars = 0;
  long long distributed_per_round = 0;
};

inline SignalingLoad signaling_load(int num_bs, int num_antennas,
                                    int num_users) {
  if (num_bs < 1 || num_antennas < 1 || num_users < 1)
    throw std::invalid_argument("signaling_load: dimensions must be positive");
  if (num_users % num_bs != 0)
    throw std::invalid_argument(
        "signaling_load: users must split evenly across cells (U mod B == 0)");
  SignalingLoad out;
  const long long B = num_bs, A = num_antennas, U = num_users;
  out.centralized_scalars = 2 * A * U * B * (B - 1);
  out.distributed_per_round = 2 * U * (B - 1);
  return out;
}

}  // namespace cobeam

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
//
// Distributed coordinated beamforming by primal decomposition: the network
// problem splits into per-BS subproblems coupled only through inter-cell
// interference caps theta(b, u), which a projected-subgradient master
// process updates from locally computed constraint sensitivities. Every
// scalar exchanged between BSs goes through the simulated backhaul log.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "cobeam/backhaul.hpp"
#include "cobeam/centralized.hpp"
#include "cobeam/conic.hpp"
#include "cobeam/model.hpp"
#include "cobeam/randomization.hpp"
#include "cobeam/types.hpp"

namespace cobeam {

/// Inter-cell interference caps: theta(b, u) bounds the interference BS b
/// may cause to user u. Only entries with b != serving_bs(u) are
/// meaningful; the rest stay zero.
struct InterferenceAllocation {
  RMatrix theta;
};

/// All (bs, user) pairs with bs not serving the user, bs-major order. This
/// is the canonical coordinate order of the master problem.
inline std::vector<std::pair<int, int>> interference_pairs(
    const SystemConfig& cfg) {
  std::vector<std::pair<int, int>> pairs;
  for (int b = 0; b < cfg.num_bs; ++b)
    for (int u = 0; u < cfg.num_users; ++u)
      if (cfg.serving_bs(u) != b) pairs.push_back({b, u});
  return pairs;
}

/// Starting caps: theta0(b, u) = gamma_u * sigma_u^2, i.e. each interferer
/// is initially allowed as much power at the user as the noise floor scaled
/// by the target.
inline InterferenceAllocation initial_allocation(const SystemConfig& cfg) {
  InterferenceAllocation alloc;
  alloc.theta = RMatrix::Zero(cfg.num_bs, cfg.num_users);
  for (const auto& [b, u] : interference_pairs(cfg))
    alloc.theta(b, u) = cfg.sinr_target[u] * cfg.noise_var[u];
  return alloc;
}

/// Per-BS subproblem at fixed caps, over this BS's group covariances only:
///
///   min sum_g Tr(W_g)
///   s.t. served u (group g):
///          Tr(H_u W_g) - gamma_u sum_{k in local, k != g} Tr(H_u W_k)
///            >= gamma_u (sigma_u^2 + sum_{j != b} theta(j, u))
///        out-of-cell u:
///          sum_{k in local} Tr(H_u W_k) <= theta(b, u)
///
/// with H_u = h_{b,u} h_{b,u}^H built from this BS's own channels. Rows are
/// ordered served users ascending, then out-of-cell users ascending.
inline SdpProblem build_bs_subproblem(const LocalChannels& local,
                                      const SystemConfig& cfg,
                                      const InterferenceAllocation& alloc) {
  const int b = local.bs;
  const std::vector<int> owned = cfg.groups_of(b);
  std::map<int, int> gpos;
  for (std::size_t i = 0; i < owned.size(); ++i)
    gpos[owned[i]] = static_cast<int>(i);

  SdpProblem prob;
  prob.block_dims.assign(owned.size(), cfg.num_antennas);
  for (int u = 0; u < cfg.num_users; ++u) {
    if (cfg.serving_bs(u) != b) continue;
    const int g = cfg.user_group[u];
    const Real gamma = cfg.sinr_target[u];
    Real cap_in = 0.0;
    for (int j = 0; j < cfg.num_bs; ++j)
      if (j != b) cap_in += alloc.theta(j, u);
    const CMatrix H = local.h[u] * local.h[u].adjoint();
    SdpConstraint con;
    con.sense = Sense::GreaterEqual;
    con.rhs = gamma * (cfg.noise_var[u] + cap_in);
    for (int k : owned)
      con.blocks.push_back({gpos[k], k == g ? H : CMatrix(-gamma * H)});
    prob.constraints.push_back(std::move(con));
  }
  for (int u = 0; u < cfg.num_users; ++u) {
    if (cfg.serving_bs(u) == b) continue;
    const CMatrix H = local.h[u] * local.h[u].adjoint();
    SdpConstraint con;
    con.sense = Sense::LessEqual;
    con.rhs = alloc.theta(b, u);
    for (std::size_t i = 0; i < owned.size(); ++i)
      con.blocks.push_back({static_cast<int>(i), H});
    prob.constraints.push_back(std::move(con));
  }
  return prob;
}

/// A solved subproblem with the two families of sensitivities the master
/// update needs: lambda[u] = gamma_u times the dual of served user u's SINR
/// row (the marginal cost of allowing more interference onto u) and
/// mu[u] = the dual of out-of-cell user u's cap row (the marginal saving
/// from being allowed to interfere more).
struct BsSubproblemResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<CMatrix> W;  // covariances, one per owned group in local order
  Real objective = 0.0;
  std::map<int, Real> lambda;
  std::map<int, Real> mu;
};

inline BsSubproblemResult solve_bs_subproblem(
    const LocalChannels& local, const SystemConfig& cfg,
    const InterferenceAllocation& alloc, Real tol = 1e-8) {
  const SdpProblem prob = build_bs_subproblem(local, cfg, alloc);
  SdpSolution sol = solve_sdp(prob, tol);
  BsSubproblemResult out;
  out.status = sol.status;
  if (!solve_ok(sol.status)) return out;
  out.W = std::move(sol.W);
  out.objective = sol.objective;
  // The sensitivities are prices of convex constraints, so they are
  // nonnegative in exact arithmetic; clamp away solver noise.
  std::size_t row = 0;
  for (int u = 0; u < cfg.num_users; ++u)
    if (cfg.serving_bs(u) == local.bs)
      out.lambda[u] =
          std::max(Real(0), cfg.sinr_target[u] * sol.dual[row++]);
  for (int u = 0; u < cfg.num_users; ++u)
    if (cfg.serving_bs(u) != local.bs)
      out.mu[u] = std::max(Real(0), sol.dual[row++]);
  return out;
}

/// One projected-subgradient coordinate update of the master problem:
/// theta' = max(theta - sigma * (lambda - mu), theta_floor).
inline Real master_update(Real theta, Real lambda, Real mu, Real sigma,
                          Real theta_floor = 1e-10) {
  return std::max(theta - sigma * (lambda - mu), theta_floor);
}

/// V(theta): the sum of per-BS optimal values at the given caps, or nullopt
/// if any subproblem is infeasible there.
inline std::optional<Real> allocation_value(const ChannelSet& ch,
                                            const SystemConfig& cfg,
                                            const InterferenceAllocation& alloc,
                                            Real tol = 1e-8) {
  Real total = 0.0;
  for (int b = 0; b < cfg.num_bs; ++b) {
    const BsSubproblemResult r =
        solve_bs_subproblem(local_view(ch, b), cfg, alloc, tol);
    if (!solve_ok(r.status)) return std::nullopt;
    total += r.objective;
  }
  return total;
}

/// Master-process step-size schedule and stopping rule. sigma0 <= 0 selects
/// the automatic scale 2 * mean(theta0), which converges on all tabulated
/// scenarios. The round-r step is sigma0 / sqrt(r + 1), damped per
/// coordinate on subgradient sign flips and trust-clipped so a cap can at
/// most halve or double within one round.
struct SubgradientSchedule {
  Real sigma0 = 0.0;  // <= 0: automatic 2 * mean of the starting caps
  Real theta_floor = 1e-10;
  int max_rounds = 200;
  Real convergence_tol = 1e-4;  // relative inf-norm change of theta
  Real sdp_tol = 1e-8;
};

/// How the caps are managed across rounds.
///  - Optimized: full per-pair subgradient optimization (the default).
///  - Common: one shared scalar cap for every (bs, user) pair, updated with
///    the aggregated subgradient.
///  - Fixed: caps stay at their starting value; a single round is solved.
///  - Nulling: no caps at all; each BS zero-forces every out-of-cell user
///    and solves its cell alone (no backhaul exchange).
enum class CapPolicy { Optimized, Common, Fixed, Nulling };

struct PolicySpec {
  CapPolicy kind = CapPolicy::Optimized;
  Real fixed_cap = 0.0;  // Fixed policy: cap value; <= 0 keeps theta0
};

/// One master round: the relaxed network objective at the caps the round
/// solved, the per-BS split, and the relative cap movement toward the next
/// round (0 when no update follows).
struct RoundTrace {
  Real sum_power = 0.0;
  Real theta_rel_change = 0.0;
  std::vector<Real> per_bs_objective;
};

struct DistributedResult {
  std::vector<CovarianceSet> cov_per_bs;  // final covariances, local order
  BeamformerSet beams;                    // recovered, indexed by group id
  InterferenceAllocation theta;           // caps the final round solved
  std::vector<RoundTrace> trace;
  BackhaulLog backhaul;
  int rounds_used = 0;
  bool converged = false;
  std::vector<bool> bs_rank_one;
  bool all_rank_one = false;
  bool randomized = false;
  int candidate_index = -1;
  Real relaxed_value = 0.0;  // V(theta) of the final round
  Real sum_power = 0.0;      // power of the recovered beams
};

namespace detail {

inline bool all_ok(const std::vector<BsSubproblemResult>& subs) {
  for (const auto& s : subs)
    if (!solve_ok(s.status)) return false;
  return true;
}

/// Round-r dual exchange: each served user's lambda goes from its serving
/// BS to every other BS, and each cap's mu goes back to the serving BS.
inline void log_round_duals(BackhaulLog& log, int round,
                            const std::vector<BsSubproblemResult>& subs,
                            const SystemConfig& cfg) {
  for (int u = 0; u < cfg.num_users; ++u) {
    const int sb = cfg.serving_bs(u);
    const Real lam = subs[sb].lambda.at(u);
    for (int j = 0; j < cfg.num_bs; ++j)
      if (j != sb)
        log.records.push_back(
            {round, MessageKind::SinrDual, sb, j, u, -1, lam});
  }
  for (int b = 0; b < cfg.num_bs; ++b)
    for (int u = 0; u < cfg.num_users; ++u)
      if (cfg.serving_bs(u) != b)
        log.records.push_back({round, MessageKind::CapDual, b,
                               cfg.serving_bs(u), u, -1, subs[b].mu.at(u)});
}

/// Cap view each BS needs for local rescaling: summed incoming allowance
/// per served user, own outgoing cap per out-of-cell user.
inline std::vector<BsCapView> cap_views(const SystemConfig& cfg,
                                        const InterferenceAllocation& alloc) {
  std::vector<BsCapView> views(cfg.num_bs);
  for (int b = 0; b < cfg.num_bs; ++b) {
    for (int u = 0; u < cfg.num_users; ++u) {
      if (cfg.serving_bs(u) == b) {
        Real incoming = 0.0;
        for (int j = 0; j < cfg.num_bs; ++j)
          if (j != b) incoming += alloc.theta(j, u);
        views[b].incoming_sum[u] = incoming;
      } else {
        views[b].outgoing[u] = alloc.theta(b, u);
      }
    }
  }
  return views;
}

/// Checks one BS's recovered beams against its own rows and, only when a
/// row is missed beyond tol, re-runs the local power LP along the recovered
/// directions. Uses nothing but local information.
inline void polish_bs_if_violated(BeamformerSet& local_beams,
                                  const std::vector<int>& local_groups,
                                  const BsCapView& caps,
                                  const LocalChannels& local,
                                  const SystemConfig& cfg, Real tol) {
  std::map<int, int> gpos;
  for (std::size_t i = 0; i < local_groups.size(); ++i)
    gpos[local_groups[i]] = static_cast<int>(i);
  bool violated = false;
  for (const auto& [u, incoming] : caps.incoming_sum) {
    const Real gamma = cfg.sinr_target[u];
    const Real rhs = gamma * (cfg.noise_var[u] + incoming);
    Real lhs = 0.0;
    for (std::size_t i = 0; i < local_groups.size(); ++i) {
      const Real gain = std::norm(local.h[u].dot(local_beams.w[i]));
      lhs += (local_groups[i] == cfg.user_group[u]) ? gain : -gamma * gain;
    }
    if (lhs < rhs - tol * (1.0 + rhs)) violated = true;
  }
  for (const auto& [u, cap] : caps.outgoing) {
    Real total = 0.0;
    for (const auto& w : local_beams.w)
      total += std::norm(local.h[u].dot(w));
    if (total > cap + tol * (1.0 + cap)) violated = true;
  }
  if (!violated) return;
  const LpSolution lp =
      power_opt_distributed(local_beams, local_groups, caps, local, cfg);
  if (!solve_ok(lp.status))
    throw NumericalError("distributed: local post-recovery power fix failed");
  std::vector<Real> p(lp.p.data(), lp.p.data() + lp.p.size());
  local_beams = scale_candidate(local_beams, p);
}

DistributedResult run_nulling(const ChannelSet& ch, const SystemConfig& cfg,
                              const RandomizationOptions& ropts, Real eps_rank,
                              Real sdp_tol);

}  // namespace detail

/// Runs the distributed optimization end to end: subgradient rounds over
/// the caps (policy-dependent), then rank-one recovery — direct
/// eigen-extraction when every BS reports rank-one covariances (one
/// broadcast bit each), otherwise synchronized Gaussian randomization in
/// which each BS broadcasts one scalar per candidate so all cells agree on
/// the winning index. Throws InfeasibleError when the starting caps admit
/// no solution and NumericalError when the master process cannot recover
/// from repeated subproblem failures.
inline DistributedResult run_distributed(
    const ChannelSet& ch, const SystemConfig& cfg,
    const SubgradientSchedule& schedule = {}, const PolicySpec& policy = {},
    const RandomizationOptions& ropts = {}, Real eps_rank = 1e-4) {
  cfg.validate();
  if (policy.kind == CapPolicy::Nulling)
    return detail::run_nulling(ch, cfg, ropts, eps_rank, schedule.sdp_tol);

  const int B = cfg.num_bs;
  std::vector<LocalChannels> locals;
  locals.reserve(B);
  for (int b = 0; b < B; ++b) locals.push_back(local_view(ch, b));
  const auto pairs = interference_pairs(cfg);
  const int npairs = static_cast<int>(pairs.size());

  InterferenceAllocation alloc = initial_allocation(cfg);
  Real theta_bar = 0.0;  // Common policy: the single shared cap
  if (npairs > 0) {
    for (const auto& [b, u] : pairs) theta_bar += alloc.theta(b, u);
    theta_bar /= npairs;
  }
  if (policy.kind == CapPolicy::Common)
    for (const auto& [b, u] : pairs) alloc.theta(b, u) = theta_bar;
  if (policy.kind == CapPolicy::Fixed && policy.fixed_cap > 0)
    for (const auto& [b, u] : pairs) alloc.theta(b, u) = policy.fixed_cap;

  Real sigma0 = schedule.sigma0;
  if (sigma0 <= 0 && npairs > 0) {
    Real mean0 = 0.0;
    for (const auto& [b, u] : pairs) mean0 += alloc.theta(b, u);
    sigma0 = 2.0 * mean0 / npairs;
  }

  const bool updating = (policy.kind == CapPolicy::Optimized ||
                         policy.kind == CapPolicy::Common) &&
                        npairs > 0;

  DistributedResult res;
  res.theta.theta = alloc.theta;

  // Per-coordinate step multipliers (halved on subgradient sign flips,
  // regrown 1.25x otherwise, capped at 1) and the last committed move for
  // infeasibility backtracking.
  RMatrix eta = RMatrix::Ones(cfg.num_bs, cfg.num_users);
  RMatrix sg_prev;
  bool have_prev = false;
  RMatrix last_theta, last_steps, last_sg;
  Real last_bar_theta = 0, last_bar_step = 0, last_bar_sg = 0;
  Real eta_bar = 1.0, sg_prev_bar = 0.0;
  bool have_last = false;

  std::vector<BsSubproblemResult> subs(B);
  auto solve_all = [&]() {
    for (int b = 0; b < B; ++b)
      subs[b] = solve_bs_subproblem(locals[b], cfg, alloc, schedule.sdp_tol);
  };

  for (int r = 0; r < schedule.max_rounds; ++r) {
    solve_all();
    // Backtracking: if any cell became infeasible, halve the last step and
    // re-project from the previous caps, up to 20 times.
    int bt = 0;
    while (!detail::all_ok(subs) && bt < 20 && have_last) {
      if (policy.kind == CapPolicy::Common) {
        last_bar_step *= 0.5;
        theta_bar = std::max(last_bar_theta - last_bar_step * last_bar_sg,
                             schedule.theta_floor);
        for (const auto& [b, u] : pairs) alloc.theta(b, u) = theta_bar;
      } else {
        last_steps *= 0.5;
        for (const auto& [b, u] : pairs)
          alloc.theta(b, u) =
              std::max(last_theta(b, u) - last_steps(b, u) * last_sg(b, u),
                       schedule.theta_floor);
      }
      solve_all();
      ++bt;
    }
    if (!detail::all_ok(subs)) {
      if (r == 0)
        throw InfeasibleError(
            "distributed: per-cell problems infeasible at the starting caps");
      throw NumericalError(
          "distributed: subproblems stayed infeasible through backtracking");
    }

    detail::log_round_duals(res.backhaul, r, subs, cfg);
    res.theta.theta = alloc.theta;  // the caps this round was solved at

    RoundTrace tr;
    tr.per_bs_objective.reserve(B);
    for (const auto& s : subs) {
      tr.sum_power += s.objective;
      tr.per_bs_objective.push_back(s.objective);
    }

    Real rel_change = 0.0;
    if (updating) {
      // Subgradient of V at theta: s(b, u) = lambda_u - mu(b, u).
      RMatrix sg = RMatrix::Zero(cfg.num_bs, cfg.num_users);
      for (const auto& [b, u] : pairs)
        sg(b, u) = subs[cfg.serving_bs(u)].lambda.at(u) - subs[b].mu.at(u);
      const Real base = sigma0 / std::sqrt(static_cast<Real>(r + 1));

      if (policy.kind == CapPolicy::Common) {
        Real S = 0.0;
        for (const auto& [b, u] : pairs) S += sg(b, u);
        if (have_prev) {
          if (S * sg_prev_bar < 0)
            eta_bar *= 0.5;
          else
            eta_bar = std::min(eta_bar * 1.25, 1.0);
        }
        const Real step = base * eta_bar;
        const Real d =
            std::clamp(step * S, -theta_bar, 0.5 * theta_bar);
        const Real next =
            std::max(theta_bar - d, schedule.theta_floor);
        rel_change = std::abs(next - theta_bar) /
                     std::max(theta_bar, Real(1e-30));
        last_bar_theta = theta_bar;
        last_bar_step = step;
        last_bar_sg = S;
        have_last = true;
        sg_prev_bar = S;
        have_prev = true;
        theta_bar = next;
        for (const auto& [b, u] : pairs) alloc.theta(b, u) = theta_bar;
      } else {
        if (have_prev) {
          for (const auto& [b, u] : pairs) {
            if (sg(b, u) * sg_prev(b, u) < 0)
              eta(b, u) *= 0.5;
            else
              eta(b, u) = std::min(eta(b, u) * 1.25, 1.0);
          }
        }
        RMatrix steps = base * eta;
        RMatrix theta_new = alloc.theta;
        Real max_change = 0.0, max_theta = 0.0;
        for (const auto& [b, u] : pairs) {
          const Real th = alloc.theta(b, u);
          const Real d =
              std::clamp(steps(b, u) * sg(b, u), -th, 0.5 * th);
          theta_new(b, u) = std::max(th - d, schedule.theta_floor);
          max_change = std::max(max_change, std::abs(theta_new(b, u) - th));
          max_theta = std::max(max_theta, std::abs(th));
        }
        rel_change = max_change / std::max(max_theta, Real(1e-30));
        last_theta = alloc.theta;
        last_steps = steps;
        last_sg = sg;
        have_last = true;
        sg_prev = sg;
        have_prev = true;
        alloc.theta = theta_new;
      }
    }

    tr.theta_rel_change = rel_change;
    res.trace.push_back(std::move(tr));

    if (!updating || rel_change <= schedule.convergence_tol) {
      res.converged = true;
      break;
    }
  }

  res.rounds_used = static_cast<int>(res.trace.size());
  res.relaxed_value = res.trace.back().sum_power;
  res.cov_per_bs.resize(B);
  for (int b = 0; b < B; ++b) res.cov_per_bs[b].W = subs[b].W;

  // Recovery phase at round index rounds_used: rank bits first.
  const int phase = res.rounds_used;
  res.bs_rank_one.resize(B);
  res.all_rank_one = true;
  for (int b = 0; b < B; ++b) {
    bool bit = true;
    for (const auto& W : res.cov_per_bs[b].W)
      bit = bit && check_rank(W, eps_rank) == 1;
    res.bs_rank_one[b] = bit;
    res.all_rank_one = res.all_rank_one && bit;
    res.backhaul.records.push_back({phase, MessageKind::RankBit, b, -1, -1,
                                    -1, bit ? 1.0 : 0.0});
  }

  const std::vector<BsCapView> caps = detail::cap_views(cfg, res.theta);
  res.beams.w.assign(cfg.num_groups, CVector());
  if (res.all_rank_one) {
    for (int b = 0; b < B; ++b) {
      const std::vector<int> owned = cfg.groups_of(b);
      BeamformerSet local_beams;
      for (const auto& W : res.cov_per_bs[b].W)
        local_beams.w.push_back(extract_rank_one(W, eps_rank));
      detail::polish_bs_if_violated(local_beams, owned, caps[b], locals[b],
                                    cfg, ropts.feasibility_tol);
      for (std::size_t i = 0; i < owned.size(); ++i)
        res.beams.w[owned[i]] = local_beams.w[i];
    }
  } else {
    const DistributedRandomization rand =
        randomize_distributed(res.cov_per_bs, locals, caps, cfg, ropts);
    for (int n = 0; n < rand.bs_powers.rows(); ++n)
      for (int b = 0; b < B; ++b)
        res.backhaul.records.push_back({phase, MessageKind::RandPower, b, -1,
                                        -1, n, rand.bs_powers(n, b)});
    res.beams = rand.beams;
    res.randomized = true;
    res.candidate_index = rand.candidate_index;
  }
  res.sum_power = sum_power(res.beams);
  return res;
}

namespace detail {

/// Zero-forcing baseline: each BS confines its transmit space to the
/// orthogonal complement of every out-of-cell user's channel and solves its
/// cell alone. No scalar ever crosses the backhaul. Covariances are
/// reported in the full antenna space (W = Q M Q^H).
inline DistributedResult run_nulling(const ChannelSet& ch,
                                     const SystemConfig& cfg,
                                     const RandomizationOptions& ropts,
                                     Real eps_rank, Real sdp_tol) {
  const int B = cfg.num_bs;
  const int A = cfg.num_antennas;
  DistributedResult res;
  res.theta.theta = RMatrix::Zero(B, cfg.num_users);
  res.bs_rank_one.resize(B);
  res.all_rank_one = true;
  res.beams.w.assign(cfg.num_groups, CVector());

  RoundTrace tr;
  for (int b = 0; b < B; ++b) {
    const LocalChannels local = local_view(ch, b);
    const std::vector<int> owned = cfg.groups_of(b);
    std::vector<int> served, others;
    for (int u = 0; u < cfg.num_users; ++u)
      (cfg.serving_bs(u) == b ? served : others).push_back(u);

    // Orthonormal basis Q of the joint null space of the out-of-cell
    // channels: h_{b,u}^H Q = 0 for every u in others.
    CMatrix Q;
    if (others.empty()) {
      Q = CMatrix::Identity(A, A);
    } else {
      CMatrix M(static_cast<int>(others.size()), A);
      for (std::size_t i = 0; i < others.size(); ++i)
        M.row(static_cast<int>(i)) = local.h[others[i]].adjoint();
      Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeFullV);
      const RVector& sv = svd.singularValues();
      int rank = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-12 * sv(0)) ++rank;
      if (rank >= A)
        throw InfeasibleError(
            "nulling: out-of-cell channels span the whole antenna space");
      Q = svd.matrixV().rightCols(A - rank);
    }
    const int d = static_cast<int>(Q.cols());

    // Reduced-space per-cell problem with structurally zero interference.
    std::map<int, int> gpos;
    for (std::size_t i = 0; i < owned.size(); ++i)
      gpos[owned[i]] = static_cast<int>(i);
    std::vector<CVector> hred(cfg.num_users);
    SdpProblem prob;
    prob.block_dims.assign(owned.size(), d);
    for (int u : served) {
      hred[u] = Q.adjoint() * local.h[u];
      const Real gamma = cfg.sinr_target[u];
      const CMatrix H = hred[u] * hred[u].adjoint();
      SdpConstraint con;
      con.sense = Sense::GreaterEqual;
      con.rhs = gamma * cfg.noise_var[u];
      for (int k : owned)
        con.blocks.push_back(
            {gpos[k], k == cfg.user_group[u] ? H : CMatrix(-gamma * H)});
      prob.constraints.push_back(std::move(con));
    }
    SdpSolution sol = solve_sdp(prob, sdp_tol);
    if (sol.status == SolveStatus::Infeasible)
      throw InfeasibleError(
          "nulling: per-cell problem infeasible under forced zero "
          "interference");
    if (!solve_ok(sol.status))
      throw NumericalError("nulling: per-cell solve failed");

    tr.sum_power += sol.objective;
    tr.per_bs_objective.push_back(sol.objective);

    CovarianceSet full;
    bool bit = true;
    for (const auto& M : sol.W) {
      full.W.push_back(Q * M * Q.adjoint());
      bit = bit && check_rank(M, eps_rank) == 1;
    }
    res.cov_per_bs.push_back(full);
    res.bs_rank_one[b] = bit;
    res.all_rank_one = res.all_rank_one && bit;

    // Per-cell recovery, entirely local: eigen-extract in the reduced space
    // when rank one, otherwise this BS's own best-of-N randomization.
    LocalChannels red_local;
    red_local.bs = b;
    red_local.h.assign(cfg.num_users, CVector());
    for (int u : served) red_local.h[u] = hred[u];
    BsCapView caps;
    for (int u : served) caps.incoming_sum[u] = 0.0;

    BeamformerSet reduced;
    if (bit) {
      for (const auto& M : sol.W)
        reduced.w.push_back(extract_rank_one(M, eps_rank));
      polish_bs_if_violated(reduced, owned, caps, red_local, cfg,
                            ropts.feasibility_tol);
    } else {
      Real best = std::numeric_limits<Real>::infinity();
      for (int n = 0; n < ropts.num_candidates; ++n) {
        BeamformerSet cand;
        for (std::size_t i = 0; i < owned.size(); ++i) {
          RngStream rng(mix_seed(ropts.seed, 0xca11d1d8ULL,
                                 static_cast<std::uint64_t>(n),
                                 static_cast<std::uint64_t>(owned[i])));
          cand.w.push_back(draw_group_candidate(sol.W[i], rng));
        }
        const Real p =
            rescale_bs_candidate(cand, owned, caps, red_local, cfg);
        if (p >= 0 && p < best) {
          best = p;
          reduced = cand;
        }
      }
      if (reduced.w.empty()) {
        BeamformerSet cand;
        for (std::size_t i = 0; i < owned.size(); ++i)
          cand.w.push_back(principal_candidate(sol.W[i]));
        if (rescale_bs_candidate(cand, owned, caps, red_local, cfg) >= 0)
          reduced = cand;
      }
      if (reduced.w.empty())
        throw RandomizationExhausted(
            "nulling: no feasible candidate in the reduced space");
    }
    for (std::size_t i = 0; i < owned.size(); ++i)
      res.beams.w[owned[i]] = Q * reduced.w[i];
  }

  tr.theta_rel_change = 0.0;
  res.trace.push_back(std::move(tr));
  res.rounds_used = 1;
  res.converged = true;
  res.relaxed_value = res.trace.back().sum_power;
  res.sum_power = sum_power(res.beams);
  return res;
}

}  // namespace detail

}  // namespace cobeam

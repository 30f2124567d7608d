// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
//
// Experiment harness: seeded Monte-Carlo sweeps over channel realizations
// for the centralized and distributed solvers and the baseline schemes,
// with fixed-schema CSV outputs (per-seed rows, aggregates, per-round
// traces, rank statistics, signaling loads) and an optional JSON-lines dump
// of every backhaul scalar. All runs are deterministic per (spec, seed) and
// re-runs produce byte-identical CSV bodies.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cobeam/backhaul.hpp"
#include "cobeam/baselines.hpp"
#include "cobeam/centralized.hpp"
#include "cobeam/distributed.hpp"
#include "cobeam/model.hpp"
#include "cobeam/randomization.hpp"
#include "cobeam/types.hpp"

namespace cobeam {

struct Scenario {
  int num_bs = 2;
  int num_groups = 4;
  int num_users = 8;
  int num_antennas = 8;
};

enum class Algorithm { Centralized, Distributed };

/// Declarative description of one experiment run.
struct ExperimentSpec {
  Scenario scenario;
  std::vector<Real> gamma_db = {0.0};  // SINR target grid
  int num_seeds = 100;
  std::uint64_t base_seed = 1;  // channel seed of trial i is base_seed + i
  Algorithm algorithm = Algorithm::Centralized;
  SubgradientSchedule schedule;
  PolicySpec policy;
  RandomizationOptions randomization;
  Real noise_var = 1.0;
  Real eps_rank = 1e-4;
  bool trace = false;          // also emit per-round trace CSVs
  bool backhaul_dump = false;  // also emit a JSON-lines backhaul log
  std::vector<int> users_per_group;  // rank-stats grid; empty = U/G only
  std::string output_dir = ".";
  std::string label = "experiment";

  void validate() const {
    if (gamma_db.empty())
      throw std::invalid_argument("spec: gamma_db grid must be non-empty");
    if (num_seeds < 1)
      throw std::invalid_argument("spec: num_seeds must be positive");
    const auto& s = scenario;
    if (s.num_bs < 1 || s.num_groups < 1 || s.num_users < 1 ||
        s.num_antennas < 1)
      throw std::invalid_argument("spec: scenario dimensions must be positive");
    if (s.num_groups % s.num_bs != 0)
      throw std::invalid_argument(
          "spec: groups must split evenly across cells (G mod B == 0)");
    if (s.num_users % s.num_groups != 0)
      throw std::invalid_argument(
          "spec: users must split evenly across groups (U mod G == 0)");
    for (int k : users_per_group)
      if (k < 1)
        throw std::invalid_argument("spec: users_per_group entries must be >= 1");
  }
};

/// One per-seed result row (fixed CSV schema). A failed trial keeps its row
/// with NaN powers; the failure reason goes to the errors file.
struct SeedRow {
  std::uint64_t seed = 0;
  std::string scheme;
  Real gamma_db = 0.0;
  Real sum_power_linear = std::numeric_limits<Real>::quiet_NaN();
  Real sum_power_db = std::numeric_limits<Real>::quiet_NaN();
  int rounds = 0;
  bool all_rank_one = false;
  long long backhaul_scalars = 0;
};

struct TraceRow {
  std::uint64_t seed = 0;
  int round = 0;
  Real sum_power_linear = 0.0;
  Real theta_change = 0.0;
};

struct ErrorRow {
  std::uint64_t seed = 0;
  std::string scheme;
  Real gamma_db = 0.0;
  std::string message;
};

struct AggregateRow {
  std::string scheme;
  Real gamma_db = 0.0;
  int seeds_used = 0;   // rows with finite power that entered the mean
  int seeds_total = 0;  // attempts (compare: excluded = total - used)
  Real mean_sum_power_linear = std::numeric_limits<Real>::quiet_NaN();
  Real mean_sum_power_db = std::numeric_limits<Real>::quiet_NaN();
};

struct TraceMeanRow {
  int round = 0;
  int seeds = 0;
  Real mean_sum_power_linear = 0.0;
  Real mean_sum_power_db = 0.0;
};

/// Rank statistics for one (users-per-group, gamma) cell: the share of
/// seeds whose relaxation came out rank-one everywhere, and — among the
/// remaining seeds — the mean of sum_g rank(W_g) / G. The average is
/// undefined (rendered "-") when every seed was rank-one.
struct RankStats {
  int users_per_group = 0;
  Real gamma_db = 0.0;
  int seeds_total = 0;
  int seeds_ok = 0;
  Real rank_one_percent = 0.0;
  bool has_higher_rank = false;
  Real avg_higher_rank = 0.0;
};

struct ExperimentResult {
  std::vector<SeedRow> per_seed;
  std::vector<AggregateRow> aggregates;
  std::vector<TraceRow> trace;
  std::vector<TraceMeanRow> trace_mean;
  std::vector<ErrorRow> errors;
  std::vector<RankStats> rank_stats;
  std::vector<std::string> files_written;
};

namespace detail {

/// Stable shortest-roundtrip decimal rendering used in every CSV cell.
inline std::string fmt(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  // Schemes and messages never contain quotes by construction; commas in
  // error messages are replaced to keep rows single-line and unquoted.
  std::string out = s;
  for (char& c : out)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return out;
}

inline SystemConfig spec_config(const Scenario& s, Real gamma_db,
                                Real noise_var) {
  return make_uniform_config(s.num_bs, s.num_groups, s.num_users,
                             s.num_antennas, db_to_linear(gamma_db),
                             noise_var);
}

/// Recovery RNG: every trial gets its own stream derived from the spec's
/// randomization seed and the channel seed.
inline RandomizationOptions trial_randomization(const ExperimentSpec& spec,
                                                std::uint64_t seed) {
  RandomizationOptions r = spec.randomization;
  r.seed = mix_seed(spec.randomization.seed, seed);
  return r;
}

inline void append_line(std::string& body, const std::string& line) {
  body += line;
  body += '\n';
}

inline std::string per_seed_csv(const std::vector<SeedRow>& rows) {
  std::string body =
      "seed,scheme,gamma_db,sum_power_linear,sum_power_db,rounds,"
      "all_rank_one,backhaul_scalars\n";
  for (const auto& r : rows)
    append_line(body, std::to_string(r.seed) + "," + r.scheme + "," +
                          fmt(r.gamma_db) + "," + fmt(r.sum_power_linear) +
                          "," + fmt(r.sum_power_db) + "," +
                          std::to_string(r.rounds) + "," +
                          std::string(r.all_rank_one ? "1" : "0") + "," +
                          std::to_string(r.backhaul_scalars));
  return body;
}

inline std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string body = "seed,round,sum_power_linear,theta_change\n";
  for (const auto& r : rows)
    append_line(body, std::to_string(r.seed) + "," + std::to_string(r.round) +
                          "," + fmt(r.sum_power_linear) + "," +
                          fmt(r.theta_change));
  return body;
}

inline std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string body =
      "scheme,gamma_db,seeds_used,seeds_total,mean_sum_power_linear,"
      "mean_sum_power_db\n";
  for (const auto& r : rows)
    append_line(body, r.scheme + "," + fmt(r.gamma_db) + "," +
                          std::to_string(r.seeds_used) + "," +
                          std::to_string(r.seeds_total) + "," +
                          fmt(r.mean_sum_power_linear) + "," +
                          fmt(r.mean_sum_power_db));
  return body;
}

inline std::string trace_mean_csv(const std::vector<TraceMeanRow>& rows) {
  std::string body = "round,seeds,mean_sum_power_linear,mean_sum_power_db\n";
  for (const auto& r : rows)
    append_line(body, std::to_string(r.round) + "," +
                          std::to_string(r.seeds) + "," +
                          fmt(r.mean_sum_power_linear) + "," +
                          fmt(r.mean_sum_power_db));
  return body;
}

inline std::string errors_csv(const std::vector<ErrorRow>& rows) {
  std::string body = "seed,scheme,gamma_db,error\n";
  for (const auto& r : rows)
    append_line(body, std::to_string(r.seed) + "," + r.scheme + "," +
                          fmt(r.gamma_db) + "," + csv_escape(r.message));
  return body;
}

inline std::string rank_stats_csv(const std::vector<RankStats>& rows) {
  std::string body =
      "users_per_group,gamma_db,seeds_ok,seeds_total,rank_one_percent,"
      "avg_higher_rank\n";
  for (const auto& r : rows)
    append_line(body,
                std::to_string(r.users_per_group) + "," + fmt(r.gamma_db) +
                    "," + std::to_string(r.seeds_ok) + "," +
                    std::to_string(r.seeds_total) + "," +
                    fmt(r.rank_one_percent) + "," +
                    (r.has_higher_rank ? fmt(r.avg_higher_rank) : "-"));
  return body;
}

inline std::string backhaul_jsonl(std::uint64_t seed, Real gamma_db,
                                  const BackhaulLog& log) {
  std::string body;
  for (const auto& rec : log.records)
    append_line(body,
                std::string("{\"seed\":") + std::to_string(seed) +
                    ",\"gamma_db\":" + fmt(gamma_db) +
                    ",\"round\":" + std::to_string(rec.round) +
                    ",\"kind\":\"" + to_string(rec.kind) + "\"" +
                    ",\"sender\":" + std::to_string(rec.sender) +
                    ",\"receiver\":" + std::to_string(rec.receiver) +
                    ",\"user\":" + std::to_string(rec.user) +
                    ",\"candidate\":" + std::to_string(rec.candidate) +
                    ",\"value\":" + fmt(rec.value) + "}");
  return body;
}

inline std::string write_file(const std::string& dir, const std::string& name,
                              const std::string& body) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write output file: " + path);
  out << body;
  return path;
}

/// Mean over rows of one (scheme, gamma) cell, skipping non-finite powers.
inline AggregateRow aggregate_cell(const std::vector<SeedRow>& rows,
                                   const std::string& scheme, Real gamma_db) {
  AggregateRow agg;
  agg.scheme = scheme;
  agg.gamma_db = gamma_db;
  Real total = 0.0;
  for (const auto& r : rows) {
    if (r.scheme != scheme || r.gamma_db != gamma_db) continue;
    ++agg.seeds_total;
    if (std::isfinite(r.sum_power_linear)) {
      ++agg.seeds_used;
      total += r.sum_power_linear;
    }
  }
  if (agg.seeds_used > 0) {
    agg.mean_sum_power_linear = total / agg.seeds_used;
    agg.mean_sum_power_db = linear_to_db(agg.mean_sum_power_linear);
  }
  return agg;
}

/// Per-round mean of the distributed traces: a seed that converged early
/// holds its final value for the remaining rounds.
inline std::vector<TraceMeanRow> mean_trace(
    const std::vector<TraceRow>& rows) {
  std::map<std::uint64_t, std::vector<Real>> per_seed;
  for (const auto& r : rows) {
    auto& v = per_seed[r.seed];
    if (static_cast<int>(v.size()) <= r.round)
      v.resize(r.round + 1, 0.0);
    v[r.round] = r.sum_power_linear;
  }
  std::size_t max_rounds = 0;
  for (const auto& [seed, v] : per_seed)
    max_rounds = std::max(max_rounds, v.size());
  std::vector<TraceMeanRow> out;
  for (std::size_t r = 0; r < max_rounds; ++r) {
    TraceMeanRow row;
    row.round = static_cast<int>(r);
    Real total = 0.0;
    for (const auto& [seed, v] : per_seed) {
      total += r < v.size() ? v[r] : v.back();
      ++row.seeds;
    }
    if (row.seeds > 0) {
      row.mean_sum_power_linear = total / row.seeds;
      row.mean_sum_power_db = linear_to_db(row.mean_sum_power_linear);
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace detail

/// Monte-Carlo sweep of one algorithm over the gamma grid and seed range.
/// Per-seed failures are recorded and the run continues. Writes
/// <label>_per_seed.csv and <label>_aggregate.csv, plus <label>_trace.csv /
/// <label>_trace_mean.csv when tracing and <label>_errors.csv when any
/// trial failed (and a backhaul JSONL dump when requested).
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult res;
  std::string backhaul_body;

  for (Real gamma_db : spec.gamma_db) {
    const SystemConfig cfg =
        detail::spec_config(spec.scenario, gamma_db, spec.noise_var);
    for (int i = 0; i < spec.num_seeds; ++i) {
      const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(i);
      const ChannelSet ch = generate_channels(cfg, seed);
      const RandomizationOptions ropts =
          detail::trial_randomization(spec, seed);
      SeedRow row;
      row.seed = seed;
      row.gamma_db = gamma_db;
      try {
        if (spec.algorithm == Algorithm::Centralized) {
          row.scheme = "centralized";
          const CentralizedResult r =
              solve_centralized(ch, cfg, ropts, spec.eps_rank);
          row.sum_power_linear = r.achieved_power;
          row.all_rank_one = r.all_rank_one;
          row.rounds = 0;  // no iterative master process
          row.backhaul_scalars =
              signaling_load(cfg.num_bs, cfg.num_antennas, cfg.num_users)
                  .centralized_scalars;
        } else {
          row.scheme = "distributed";
          const DistributedResult r = run_distributed(
              ch, cfg, spec.schedule, spec.policy, ropts, spec.eps_rank);
          row.sum_power_linear = r.sum_power;
          row.all_rank_one = r.all_rank_one;
          row.rounds = r.rounds_used;
          row.backhaul_scalars = static_cast<long long>(r.backhaul.total());
          if (spec.trace)
            for (int t = 0; t < static_cast<int>(r.trace.size()); ++t)
              res.trace.push_back({seed, t, r.trace[t].sum_power,
                                   r.trace[t].theta_rel_change});
          if (spec.backhaul_dump)
            backhaul_body +=
                detail::backhaul_jsonl(seed, gamma_db, r.backhaul);
        }
        row.sum_power_db = linear_to_db(row.sum_power_linear);
      } catch (const std::exception& e) {
        res.errors.push_back({seed, row.scheme, gamma_db, e.what()});
      }
      res.per_seed.push_back(std::move(row));
    }
  }

  const std::string scheme = spec.algorithm == Algorithm::Centralized
                                 ? "centralized"
                                 : "distributed";
  for (Real gamma_db : spec.gamma_db)
    res.aggregates.push_back(
        detail::aggregate_cell(res.per_seed, scheme, gamma_db));
  if (spec.trace) res.trace_mean = detail::mean_trace(res.trace);

  res.files_written.push_back(detail::write_file(
      spec.output_dir, spec.label + "_per_seed.csv",
      detail::per_seed_csv(res.per_seed)));
  res.files_written.push_back(detail::write_file(
      spec.output_dir, spec.label + "_aggregate.csv",
      detail::aggregate_csv(res.aggregates)));
  if (spec.trace) {
    res.files_written.push_back(detail::write_file(
        spec.output_dir, spec.label + "_trace.csv",
        detail::trace_csv(res.trace)));
    res.files_written.push_back(detail::write_file(
        spec.output_dir, spec.label + "_trace_mean.csv",
        detail::trace_mean_csv(res.trace_mean)));
  }
  if (!res.errors.empty())
    res.files_written.push_back(detail::write_file(
        spec.output_dir, spec.label + "_errors.csv",
        detail::errors_csv(res.errors)));
  if (spec.backhaul_dump)
    res.files_written.push_back(detail::write_file(
        spec.output_dir, spec.label + "_backhaul.jsonl", backhaul_body));
  return res;
}

/// Runs the coordinated scheme and both baselines on identical channels and
/// aggregates each (scheme, gamma) mean over the seeds where all three
/// schemes were feasible (pairwise exclusion; the excluded count is
/// seeds_total - seeds_used in the aggregate CSV).
inline ExperimentResult compare_schemes(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult res;
  const char* schemes[] = {"coordinated", "nulling", "orthogonal"};

  for (Real gamma_db : spec.gamma_db) {
    const SystemConfig cfg =
        detail::spec_config(spec.scenario, gamma_db, spec.noise_var);
    std::map<std::string, std::vector<Real>> kept;  // only common-feasible
    std::vector<SeedRow> cell_rows;

    for (int i = 0; i < spec.num_seeds; ++i) {
      const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(i);
      const ChannelSet ch = generate_channels(cfg, seed);
      const RandomizationOptions ropts =
          detail::trial_randomization(spec, seed);
      std::map<std::string, Real> power;

      for (const char* scheme : schemes) {
        SeedRow row;
        row.seed = seed;
        row.scheme = scheme;
        row.gamma_db = gamma_db;
        try {
          if (std::string(scheme) == "coordinated") {
            const CentralizedResult r =
                solve_centralized(ch, cfg, ropts, spec.eps_rank);
            row.sum_power_linear = r.achieved_power;
            row.all_rank_one = r.all_rank_one;
            row.backhaul_scalars =
                signaling_load(cfg.num_bs, cfg.num_antennas, cfg.num_users)
                    .centralized_scalars;
          } else if (std::string(scheme) == "nulling") {
            const BaselineResult r =
                interference_nulling(ch, cfg, ropts, spec.eps_rank);
            if (!r.feasible) throw InfeasibleError("nulling infeasible");
            row.sum_power_linear = r.sum_power;
            row.all_rank_one = r.all_rank_one;
            row.rounds = 1;
          } else {
            const BaselineResult r =
                orthogonal_access(ch, cfg, ropts, spec.eps_rank);
            if (!r.feasible) throw InfeasibleError("orthogonal infeasible");
            row.sum_power_linear = r.sum_power;
            row.all_rank_one = r.all_rank_one;
          }
          row.sum_power_db = linear_to_db(row.sum_power_linear);
          power[scheme] = row.sum_power_linear;
        } catch (const std::exception& e) {
          res.errors.push_back({seed, scheme, gamma_db, e.what()});
        }
        cell_rows.push_back(std::move(row));
      }
      if (power.size() == 3)  // all schemes feasible on this seed
        for (const auto& [scheme, p] : power) kept[scheme].push_back(p);
    }

    for (const char* scheme : schemes) {
      AggregateRow agg;
      agg.scheme = scheme;
      agg.gamma_db = gamma_db;
      agg.seeds_total = spec.num_seeds;
      const auto& v = kept[scheme];
      agg.seeds_used = static_cast<int>(v.size());
      if (!v.empty()) {
        Real total = 0.0;
        for (Real p : v) total += p;
        agg.mean_sum_power_linear = total / v.size();
        agg.mean_sum_power_db = linear_to_db(agg.mean_sum_power_linear);
      }
      res.aggregates.push_back(agg);
    }
    for (auto& r : cell_rows) res.per_seed.push_back(std::move(r));
  }

  res.files_written.push_back(detail::write_file(
      spec.output_dir, spec.label + "_per_seed.csv",
      detail::per_seed_csv(res.per_seed)));
  res.files_written.push_back(detail::write_file(
      spec.output_dir, spec.label + "_aggregate.csv",
      detail::aggregate_csv(res.aggregates)));
  if (!res.errors.empty())
    res.files_written.push_back(detail::write_file(
        spec.output_dir, spec.label + "_errors.csv",
        detail::errors_csv(res.errors)));
  return res;
}

/// Rank statistics of the centralized relaxation over a grid of group
/// sizes (users_per_group; defaults to the scenario's own U/G) and the
/// gamma grid. Trials that fail to solve are dropped from the denominator.
inline ExperimentResult rank_stats(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult res;

  std::vector<int> grid = spec.users_per_group;
  if (grid.empty())
    grid.push_back(spec.scenario.num_users / spec.scenario.num_groups);

  for (int k : grid) {
    Scenario sc = spec.scenario;
    sc.num_users = k * sc.num_groups;
    for (Real gamma_db : spec.gamma_db) {
      const SystemConfig cfg =
          detail::spec_config(sc, gamma_db, spec.noise_var);
      RankStats st;
      st.users_per_group = k;
      st.gamma_db = gamma_db;
      st.seeds_total = spec.num_seeds;
      int rank_one = 0;
      Real higher_sum = 0.0;
      int higher_n = 0;
      for (int i = 0; i < spec.num_seeds; ++i) {
        const std::uint64_t seed =
            spec.base_seed + static_cast<std::uint64_t>(i);
        const ChannelSet ch = generate_channels(cfg, seed);
        try {
          const SdpSolution sol =
              solve_sdp(build_centralized_sdp(ch, cfg));
          if (!solve_ok(sol.status))
            throw NumericalError("relaxation solve failed");
          ++st.seeds_ok;
          bool all_one = true;
          int rank_total = 0;
          for (const auto& W : sol.W) {
            const int r = check_rank(W, spec.eps_rank);
            rank_total += r;
            all_one = all_one && r == 1;
          }
          if (all_one) {
            ++rank_one;
          } else {
            higher_sum += static_cast<Real>(rank_total) / cfg.num_groups;
            ++higher_n;
          }
        } catch (const std::exception& e) {
          res.errors.push_back({seed, "rank_stats", gamma_db, e.what()});
        }
      }
      if (st.seeds_ok > 0)
        st.rank_one_percent = 100.0 * rank_one / st.seeds_ok;
      st.has_higher_rank = higher_n > 0;
      if (higher_n > 0) st.avg_higher_rank = higher_sum / higher_n;
      res.rank_stats.push_back(st);
    }
  }

  res.files_written.push_back(detail::write_file(
      spec.output_dir, spec.label + "_rank_stats.csv",
      detail::rank_stats_csv(res.rank_stats)));
  if (!res.errors.empty())
    res.files_written.push_back(detail::write_file(
        spec.output_dir, spec.label + "_errors.csv",
        detail::errors_csv(res.errors)));
  return res;
}

/// Signaling-load table. With use_spec_scenario the table holds the spec's
/// scenario only; otherwise the three reference configurations.
inline std::vector<std::array<long long, 5>> signaling_table_rows(
    const ExperimentSpec& spec, bool use_spec_scenario) {
  std::vector<std::array<int, 3>> configs;
  if (use_spec_scenario) {
    configs.push_back({spec.scenario.num_bs, spec.scenario.num_antennas,
                       spec.scenario.num_users});
  } else {
    configs = {{2, 8, 8}, {3, 12, 12}, {4, 16, 16}};
  }
  std::vector<std::array<long long, 5>> rows;
  for (const auto& [B, A, U] : configs) {
    const SignalingLoad load = signaling_load(B, A, U);
    rows.push_back({B, A, U, load.centralized_scalars,
                    load.distributed_per_round});
  }
  return rows;
}

inline ExperimentResult signaling_table(const ExperimentSpec& spec,
                                        bool use_spec_scenario = false) {
  ExperimentResult res;
  std::string body =
      "num_bs,num_antennas,num_users,centralized_scalars,"
      "distributed_per_round\n";
  for (const auto& row : signaling_table_rows(spec, use_spec_scenario)) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i)
      line += (i ? "," : "") + std::to_string(row[i]);
    detail::append_line(body, line);
  }
  res.files_written.push_back(detail::write_file(
      spec.output_dir, spec.label + "_signaling.csv", body));
  return res;
}

}  // namespace cobeam

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
//
// cobeam — coordinated multicast beamforming simulator.
//
// Subcommands:
//   run-centralized   Monte-Carlo sweep of the centralized design
//   run-distributed   Monte-Carlo sweep of the distributed design
//   compare-schemes   coordinated vs nulling vs orthogonal on common seeds
//   rank-stats        rank-one statistics of the relaxation
//   signaling-table   backhaul signaling load table
//
// Every subcommand accepts --config (a JSON document with the ExperimentSpec
// fields); command-line flags override config values. The stochastic
// subcommands require an explicit --seed. Exit code 0 on success; on failure
// a single machine-readable JSON error object is printed to stderr and the
// exit code is nonzero.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cobeam/config_io.hpp"
#include "cobeam/experiment.hpp"
#include "cobeam/version.hpp"

namespace {

struct CliState {
  cobeam::ExperimentSpec spec;
  std::string config_path;
  bool spec_scenario_table = false;  // signaling-table: use spec's scenario
};

// Adds the shared experiment options to a subcommand. Flag values land in
// `spec` only when given, after any --config file has been applied, so the
// precedence is: defaults < config file < flags.
void add_common_options(CLI::App* cmd, CliState& st, bool needs_seed) {
  cmd->add_option("--config", st.config_path,
                  "JSON config file (ExperimentSpec fields)")
      ->check(CLI::ExistingFile);
  auto* seed = cmd->add_option("--seed", st.spec.base_seed,
                               "base seed; trial i uses seed + i");
  if (needs_seed) seed->required();
  cmd->add_option("--seeds", st.spec.num_seeds, "number of Monte-Carlo trials");
  cmd->add_option("--bs", st.spec.scenario.num_bs, "number of base stations");
  cmd->add_option("--groups", st.spec.scenario.num_groups,
                  "number of multicast groups");
  cmd->add_option("--users", st.spec.scenario.num_users, "number of users");
  cmd->add_option("--antennas", st.spec.scenario.num_antennas,
                  "antennas per base station");
  cmd->add_option("--gamma-db", st.spec.gamma_db,
                  "SINR target grid in dB (repeatable)");
  cmd->add_option("--noise-var", st.spec.noise_var, "per-user noise variance");
  cmd->add_option("--eps-rank", st.spec.eps_rank,
                  "relative eigenvalue threshold for rank decisions");
  cmd->add_option("--candidates", st.spec.randomization.num_candidates,
                  "randomization candidates per recovery");
  cmd->add_option("--rand-seed", st.spec.randomization.seed,
                  "seed of the randomization streams");
  cmd->add_option("--output-dir", st.spec.output_dir, "output directory");
  cmd->add_option("--label", st.spec.label, "output file name stem");
}

void add_distributed_options(CLI::App* cmd, CliState& st) {
  cmd->add_option("--max-rounds", st.spec.schedule.max_rounds,
                  "maximum coordination rounds");
  cmd->add_option("--sigma0", st.spec.schedule.sigma0,
                  "initial step size (<=0: automatic)");
  cmd->add_option("--tol", st.spec.schedule.convergence_tol,
                  "relative cap-change convergence tolerance");
  cmd->add_option("--theta-floor", st.spec.schedule.theta_floor,
                  "lower bound keeping caps strictly positive");
  cmd->add_option_function<std::string>(
         "--policy",
         [&st](const std::string& s) {
           st.spec.policy.kind = cobeam::policy_from_string(s);
         },
         "cap policy: optimized|common|fixed|nulling")
      ->check(CLI::IsMember({"optimized", "common", "fixed", "nulling"}));
  cmd->add_option("--fixed-cap", st.spec.policy.fixed_cap,
                  "cap value for the fixed policy (<=0 keeps the start caps)");
  cmd->add_flag("--trace", st.spec.trace, "emit per-round trace CSVs");
  cmd->add_flag("--backhaul-dump", st.spec.backhaul_dump,
                "emit a JSON-lines dump of every backhaul scalar");
}

// Re-parses the subcommand with the config file as the base so explicit
// flags win. CLI11 assigns option values during parse; the config must be
// loaded first, which requires a two-pass parse.
void apply_config(CliState& st) {
  if (st.config_path.empty()) return;
  cobeam::ExperimentSpec from_file = cobeam::load_spec(st.config_path);
  st.spec = from_file;
}

void print_aggregates(const cobeam::ExperimentResult& res) {
  for (const auto& a : res.aggregates) {
    if (a.seeds_used > 0)
      std::printf("%-12s gamma %6.2f dB: mean sum power %.6f (%.3f dB) over "
                  "%d/%d seeds\n",
                  a.scheme.c_str(), a.gamma_db, a.mean_sum_power_linear,
                  a.mean_sum_power_db, a.seeds_used, a.seeds_total);
    else
      std::printf("%-12s gamma %6.2f dB: no feasible seeds (%d attempted)\n",
                  a.scheme.c_str(), a.gamma_db, a.seeds_total);
  }
  if (!res.errors.empty())
    std::printf("%zu trial failure(s) recorded in the errors file\n",
                res.errors.size());
  for (const auto& f : res.files_written) std::printf("wrote %s\n", f.c_str());
}

void print_rank_stats(const cobeam::ExperimentResult& res) {
  std::printf("%16s %10s %12s %16s\n", "users_per_group", "gamma_dB",
              "rank_one_%", "avg_higher_rank");
  for (const auto& r : res.rank_stats) {
    if (r.has_higher_rank)
      std::printf("%16d %10.2f %12.2f %16.4f\n", r.users_per_group, r.gamma_db,
                  r.rank_one_percent, r.avg_higher_rank);
    else
      std::printf("%16d %10.2f %12.2f %16s\n", r.users_per_group, r.gamma_db,
                  r.rank_one_percent, "-");
  }
  for (const auto& f : res.files_written) std::printf("wrote %s\n", f.c_str());
}

void print_signaling(const cobeam::ExperimentSpec& spec, bool use_scenario,
                     const cobeam::ExperimentResult& res) {
  std::printf("%6s %10s %8s %22s %22s\n", "bs", "antennas", "users",
              "centralized_scalars", "distributed_per_round");
  for (const auto& row :
       cobeam::signaling_table_rows(spec, use_scenario))
    std::printf("%6lld %10lld %8lld %22lld %22lld\n", row[0], row[1], row[2],
                row[3], row[4]);
  for (const auto& f : res.files_written) std::printf("wrote %s\n", f.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coordinated multicast beamforming simulator"};
  app.set_version_flag("--version", COBEAM_VERSION_STRING);
  app.require_subcommand(1);

  CliState st;

  auto* run_c = app.add_subcommand(
      "run-centralized", "Monte-Carlo sweep of the centralized design");
  add_common_options(run_c, st, /*needs_seed=*/true);

  auto* run_d = app.add_subcommand(
      "run-distributed", "Monte-Carlo sweep of the distributed design");
  add_common_options(run_d, st, /*needs_seed=*/true);
  add_distributed_options(run_d, st);

  auto* cmp = app.add_subcommand(
      "compare-schemes",
      "coordinated vs nulling vs orthogonal on common seeds");
  add_common_options(cmp, st, /*needs_seed=*/true);

  auto* ranks = app.add_subcommand(
      "rank-stats", "rank-one statistics of the relaxation");
  add_common_options(ranks, st, /*needs_seed=*/true);
  ranks->add_option("--users-per-group", st.spec.users_per_group,
                    "group size grid (repeatable; default: scenario's own)");

  auto* table = app.add_subcommand(
      "signaling-table", "backhaul signaling load table");
  add_common_options(table, st, /*needs_seed=*/false);
  table->add_flag("--spec-scenario", st.spec_scenario_table,
                  "tabulate the configured scenario instead of the "
                  "reference configurations");

  // Pass 1 finds the config file; pass 2 re-parses so explicit flags
  // override the config-provided values.
  try {
    app.parse(argc, argv);
    if (!st.config_path.empty()) {
      apply_config(st);
      app.clear();
      app.parse(argc, argv);
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::fprintf(stderr, "{\"error\":\"%s\"}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"error\":\"%s\"}\n", e.what());
    return 1;
  }

  try {
    cobeam::ExperimentResult res;
    if (*run_c) {
      st.spec.algorithm = cobeam::Algorithm::Centralized;
      res = cobeam::run_experiment(st.spec);
      print_aggregates(res);
    } else if (*run_d) {
      st.spec.algorithm = cobeam::Algorithm::Distributed;
      res = cobeam::run_experiment(st.spec);
      print_aggregates(res);
    } else if (*cmp) {
      res = cobeam::compare_schemes(st.spec);
      print_aggregates(res);
    } else if (*ranks) {
      res = cobeam::rank_stats(st.spec);
      print_rank_stats(res);
    } else if (*table) {
      res = cobeam::signaling_table(st.spec, st.spec_scenario_table);
      print_signaling(st.spec, st.spec_scenario_table, res);
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"error\":\"%s\"}\n", e.what());
    return 1;
  }
}

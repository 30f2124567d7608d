// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
//
// JSON (de)serialization of ExperimentSpec. The document carries exactly the
// spec's fields; unknown keys are rejected so config typos fail loudly.
// Requires the bundled nlohmann/json single header (third_party/json.hpp).
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cobeam/experiment.hpp"

namespace cobeam {

namespace detail {

inline void check_keys(const nlohmann::json& j, const char* where,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw std::invalid_argument(std::string("config: ") + where +
                                " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok)
      throw std::invalid_argument(std::string("config: unknown key \"") +
                                  key + "\" in " + where);
  }
}

template <typename T>
void maybe_get(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace detail

inline std::string to_string(Algorithm a) {
  return a == Algorithm::Centralized ? "centralized" : "distributed";
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "centralized") return Algorithm::Centralized;
  if (s == "distributed") return Algorithm::Distributed;
  throw std::invalid_argument("config: unknown algorithm \"" + s +
                              "\" (expected centralized|distributed)");
}

inline std::string to_string(CapPolicy p) {
  switch (p) {
    case CapPolicy::Optimized: return "optimized";
    case CapPolicy::Common: return "common";
    case CapPolicy::Fixed: return "fixed";
    case CapPolicy::Nulling: return "nulling";
  }
  return "optimized";
}

inline CapPolicy policy_from_string(const std::string& s) {
  if (s == "optimized") return CapPolicy::Optimized;
  if (s == "common") return CapPolicy::Common;
  if (s == "fixed") return CapPolicy::Fixed;
  if (s == "nulling") return CapPolicy::Nulling;
  throw std::invalid_argument(
      "config: unknown policy \"" + s +
      "\" (expected optimized|common|fixed|nulling)");
}

inline nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["scenario"] = {{"num_bs", spec.scenario.num_bs},
                   {"num_groups", spec.scenario.num_groups},
                   {"num_users", spec.scenario.num_users},
                   {"num_antennas", spec.scenario.num_antennas}};
  j["gamma_db"] = spec.gamma_db;
  j["num_seeds"] = spec.num_seeds;
  j["base_seed"] = spec.base_seed;
  j["algorithm"] = to_string(spec.algorithm);
  j["schedule"] = {{"sigma0", spec.schedule.sigma0},
                   {"theta_floor", spec.schedule.theta_floor},
                   {"max_rounds", spec.schedule.max_rounds},
                   {"convergence_tol", spec.schedule.convergence_tol},
                   {"sdp_tol", spec.schedule.sdp_tol}};
  j["policy"] = {{"kind", to_string(spec.policy.kind)},
                 {"fixed_cap", spec.policy.fixed_cap}};
  j["randomization"] = {{"num_candidates", spec.randomization.num_candidates},
                        {"seed", spec.randomization.seed},
                        {"feasibility_tol", spec.randomization.feasibility_tol}};
  j["noise_var"] = spec.noise_var;
  j["eps_rank"] = spec.eps_rank;
  j["trace"] = spec.trace;
  j["backhaul_dump"] = spec.backhaul_dump;
  j["users_per_group"] = spec.users_per_group;
  j["output_dir"] = spec.output_dir;
  j["label"] = spec.label;
  return j;
}

/// Parses a spec document. Every field is optional and defaults to the
/// ExperimentSpec default; unknown keys anywhere are an error.
inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
  detail::check_keys(j, "spec",
                     {"scenario", "gamma_db", "num_seeds", "base_seed",
                      "algorithm", "schedule", "policy", "randomization",
                      "noise_var", "eps_rank", "trace", "backhaul_dump",
                      "users_per_group", "output_dir", "label"});
  ExperimentSpec spec;
  if (j.contains("scenario")) {
    const auto& s = j.at("scenario");
    detail::check_keys(s, "scenario",
                       {"num_bs", "num_groups", "num_users", "num_antennas"});
    detail::maybe_get(s, "num_bs", spec.scenario.num_bs);
    detail::maybe_get(s, "num_groups", spec.scenario.num_groups);
    detail::maybe_get(s, "num_users", spec.scenario.num_users);
    detail::maybe_get(s, "num_antennas", spec.scenario.num_antennas);
  }
  detail::maybe_get(j, "gamma_db", spec.gamma_db);
  detail::maybe_get(j, "num_seeds", spec.num_seeds);
  detail::maybe_get(j, "base_seed", spec.base_seed);
  if (j.contains("algorithm"))
    spec.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    detail::check_keys(s, "schedule",
                       {"sigma0", "theta_floor", "max_rounds",
                        "convergence_tol", "sdp_tol"});
    detail::maybe_get(s, "sigma0", spec.schedule.sigma0);
    detail::maybe_get(s, "theta_floor", spec.schedule.theta_floor);
    detail::maybe_get(s, "max_rounds", spec.schedule.max_rounds);
    detail::maybe_get(s, "convergence_tol", spec.schedule.convergence_tol);
    detail::maybe_get(s, "sdp_tol", spec.schedule.sdp_tol);
  }
  if (j.contains("policy")) {
    const auto& p = j.at("policy");
    detail::check_keys(p, "policy", {"kind", "fixed_cap"});
    if (p.contains("kind"))
      spec.policy.kind = policy_from_string(p.at("kind").get<std::string>());
    detail::maybe_get(p, "fixed_cap", spec.policy.fixed_cap);
  }
  if (j.contains("randomization")) {
    const auto& r = j.at("randomization");
    detail::check_keys(r, "randomization",
                       {"num_candidates", "seed", "feasibility_tol"});
    detail::maybe_get(r, "num_candidates", spec.randomization.num_candidates);
    detail::maybe_get(r, "seed", spec.randomization.seed);
    detail::maybe_get(r, "feasibility_tol", spec.randomization.feasibility_tol);
  }
  detail::maybe_get(j, "noise_var", spec.noise_var);
  detail::maybe_get(j, "eps_rank", spec.eps_rank);
  detail::maybe_get(j, "trace", spec.trace);
  detail::maybe_get(j, "backhaul_dump", spec.backhaul_dump);
  detail::maybe_get(j, "users_per_group", spec.users_per_group);
  detail::maybe_get(j, "output_dir", spec.output_dir);
  detail::maybe_get(j, "label", spec.label);
  return spec;
}

inline ExperimentSpec parse_spec(const std::string& text) {
  return spec_from_json(nlohmann::json::parse(text));
}

inline ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

inline std::string dump_spec(const ExperimentSpec& spec, int indent = 2) {
  return spec_to_json(spec).dump(indent) + "\n";
}

}  // namespace cobeam

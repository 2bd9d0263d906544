#pragma once

#include <string>
#include <vector>

#include "sftlab/io.hpp"
#include "sftlab/localq.hpp"

namespace sftlab {

struct ExperimentPlan {
  std::string experiment;  // entropy fix extensions beeps localq glider permuter
                           // sqroot classify verify
  std::string spec_source; // path or builtin:<name>; may be empty for classify
  Json params = Json::object();
  std::uint64_t seed = 1;
  std::uint64_t budget = Budget::kDefaultLimit;
};

ExperimentPlan plan_from_json(const Json& j);

// Deterministic given the seed. Throws on schema violations; budget exhaustion
// yields a partial report with "budget_exceeded": true.
Json run_experiment(const ExperimentPlan& plan);

struct VerifyOutcome {
  std::string module;
  std::string name;
  std::string status;  // pass | fail | skip
  std::string detail;
};

std::vector<VerifyOutcome> verify_suite(const SftSpec& spec, const std::string& depth,
                                        std::uint64_t seed, Budget& budget);
Json verify_outcomes_to_json(const std::vector<VerifyOutcome>& outcomes);

}  // namespace sftlab

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holovar/oracle.hpp"
#include "holovar/serialize.hpp"

namespace holovar {

// One batch experiment: a command plus everything needed to reproduce it.
// Reports are a pure function of this record (timing aside).
struct ExperimentConfig {
  std::string command;  // sample | involution-check | fiber-count |
                        // surjectivity-probe | phi-check | lift-degree | oracle
  std::optional<GroupId> group;               // matrix-group commands
  std::optional<BuiltinGroup> finite_group;   // oracle command
  std::optional<SurfacePresentation> surface;
  int twist_index = 0;
  int trials = 1;
  std::uint64_t seed = 0;
  int perturbations = 10;   // gauge perturbations per surjectivity trial
  int jobs = 0;             // worker threads; 0 picks the hardware count
  double failure_ceiling = 0.25;
  Tolerances tol;
};

ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);

struct RunOutcome {
  Json report;
  int exit_code = 0;  // 0 ok, 3 when the failure rate exceeded the ceiling
};

// Dispatches the config to the matching pipeline and assembles the report
// (config echo, per-trial records with derived seeds, summary, timing).
// Invalid configurations throw; numerical failures are recorded per trial.
RunOutcome run_experiment(const ExperimentConfig& config);

}  // namespace holovar

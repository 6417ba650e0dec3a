#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fsic/config.hpp"

namespace fsic {

struct ExperimentResult {
  std::filesystem::path trajectories_csv;
  std::filesystem::path summary_json;
  nlohmann::ordered_json summary;
};

// Runs the configured experiment and writes trajectories.csv and summary.json
// into the output directory. Byte-stable for a fixed (config, seed),
// independent of worker count; the wall_time_seconds field is the one
// documented exception.
ExperimentResult run_experiment(const RunConfig& cfg);

}  // namespace fsic

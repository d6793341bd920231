#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hdmean/io.hpp"
#include "hdmean/risk.hpp"

namespace hdmean::cli {

struct OutputSpec {
  std::string path;
  io::ReportFormat format = io::ReportFormat::Csv;
  std::string losses_path;  // optional per-replication loss dump
};

struct SimulateConfig {
  SimulationDesign design;
  std::vector<std::string> estimators;
  int replications = 0;
  std::uint64_t seed = 0;
  int workers = 0;
  OutputSpec output;
};

struct SweepConfig {
  SimulationDesign design;  // sigma comes from the sweep block
  SigmaFamily family = SigmaFamily::Sigma2;
  std::vector<double> grid;
  std::vector<std::string> estimators;
  int replications = 0;
  std::uint64_t seed = 0;
  int workers = 0;
  OutputSpec output;
};

// Strict JSON loaders: unknown keys, missing required fields and values that
// violate module preconditions raise ConfigError naming the field.
SimulateConfig load_simulate_config(const std::string& path);
SweepConfig load_sweep_config(const std::string& path);
SimulationDesign design_from_json(const nlohmann::json& j);

// Exit codes: 0 success, 1 runtime failure, 2 configuration/validation
// failure.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace hdmean::cli

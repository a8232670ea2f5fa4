#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pathgat/discovery.hpp"
#include "pathgat/graph.hpp"
#include "pathgat/simulator.hpp"
#include "pathgat/train.hpp"

namespace pathgat {

// process exit codes shared by all CLI verbs
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitDiverged = 3;

/// Resolved experiment description: where data comes from, which models to
/// run, and the training/discovery settings.
struct ExperimentConfig {
  PathwayConfig pathway = PathwayConfig::canonical_p53();
  std::optional<std::string> data_csv;  // when unset, data comes from the simulator
  SimConfig sim;
  std::string model_kind = "both";      // gat | mlp | both
  GatConfig gat;
  MlpConfig mlp;
  TrainConfig train;
  DiscoveryConfig discovery;
  double discovery_threshold = 0.05;
  SimConfig discovery_sim = default_discovery_sim();
  int discovery_replicates = 12;
  int sim_replicates = 2;

  /// Transient-rich sampling regime used for interaction discovery: a dense
  /// short grid right after strongly jittered initial conditions, where the
  /// cross-gene couplings are visible in the data.
  static SimConfig default_discovery_sim();
  bool apply_interventions = true;      // use the pathway's named interventions at test time

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  /// FNV-1a hash of the resolved config text, for reproducibility stamps.
  std::string hash() const;

  /// Loads data_csv when set, otherwise simulates.
  std::vector<Trajectory> load_or_simulate() const;

  /// Data for discovery: data_csv when set, otherwise the discovery regime.
  std::vector<Trajectory> load_or_simulate_discovery() const;
};

struct CliOptions {
  std::string out_dir = "runs/out";
  std::optional<int> seeds;        // overrides config seed count
  int jobs = 1;
  std::optional<double> threshold;
  std::vector<std::string> intervene;  // relation:src:dst:remove|add[:condition]
};

int cmd_simulate(const ExperimentConfig& cfg, const CliOptions& opts);
int cmd_train(const ExperimentConfig& cfg, const CliOptions& opts);
int cmd_loco(const ExperimentConfig& cfg, const CliOptions& opts);
int cmd_discover(const ExperimentConfig& cfg, const CliOptions& opts);
int cmd_report(const std::string& run_dir, const std::string& out_path);

}  // namespace pathgat

#pragma once

#include <array>
#include <string>
#include <vector>

#include "pathgat/simulator.hpp"

namespace pathgat {

inline constexpr int kNumGenes = 3;
inline constexpr int kNumConditions = 3;
inline constexpr int kWindowLen = 3;  // t1,t2,t3 -> t4

/// Feature layout per node: y(t1..t3) at 0-2, time gaps at 3-5, treatment
/// one-hot at 6..6+K-1.
inline constexpr int kFeatureDim = kWindowLen + kWindowLen + kNumConditions;

/// One windowed training instance in raw expression units.
struct Sample {
  // node_features[g] = [y_g(t1..t3), dt1..dt3, one-hot condition]
  std::array<std::array<double, kFeatureDim>, kNumGenes> node_features;
  std::array<double, kNumGenes> target;  // expression at t4
  Condition condition = Condition::kWildType;
  int trajectory_id = 0;
  int window_start = 0;
};

/// Per-gene z-scoring statistics fitted on training data only.
struct Standardizer {
  std::array<double, kNumGenes> mean{};
  std::array<double, kNumGenes> sd{};

  static Standardizer fit(const std::vector<Sample>& samples);
  double apply(int gene, double raw) const { return (raw - mean[gene]) / sd[gene]; }
  double invert(int gene, double z) const { return z * sd[gene] + mean[gene]; }

  /// Standardizes the y features and target of a sample; time gaps and the
  /// treatment one-hot pass through unchanged.
  Sample transform(const Sample& s) const;
};

struct LocoFold {
  Condition held_out;
  std::vector<Sample> train;  // raw units
  std::vector<Sample> test;
  Standardizer standardizer;  // fitted on train only

  std::vector<Sample> standardized_train() const;
  std::vector<Sample> standardized_test() const;
};

/// Sliding t1,t2,t3 -> t4 windows with stride 1; T points give T-3 samples.
/// The three time gaps are (t2-t1, t3-t2, t4-t3); set include_target_gap
/// false to use the t1..t3 gaps only (third gap repeats t3-t2).
std::vector<Sample> window_samples(const Trajectory& t, int trajectory_id = 0,
                                   bool include_target_gap = true);

std::vector<Sample> window_all(const std::vector<Trajectory>& trajs,
                               bool include_target_gap = true);

/// One fold per condition; fold k holds out condition k entirely and refits
/// the standardizer on the remaining training samples.
std::vector<LocoFold> loco_folds(const std::vector<Sample>& samples);

// CSV schema, one row per time point: condition,replicate,time_h,TP53,MDM2,MDM4
std::vector<Trajectory> read_trajectories(const std::string& path);
void write_trajectories(const std::string& path, const std::vector<Trajectory>& trajs);
std::string trajectories_to_csv(const std::vector<Trajectory>& trajs);
std::vector<Trajectory> trajectories_from_csv(const std::string& text);

}  // namespace pathgat

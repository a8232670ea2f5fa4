#pragma once

#include <array>
#include <string>
#include <vector>

#include "pathgat/dataset.hpp"
#include "pathgat/graph.hpp"
#include "pathgat/model.hpp"
#include "pathgat/train.hpp"

namespace pathgat {

/// N x N signed interaction scores learned without a structural prior.
/// score[target][source]; tanh-derived scores lie in [-1, 1].
struct SignedInteractionMatrix {
  std::vector<std::string> genes;
  std::vector<std::vector<double>> score;  // [target][source]
  int heads_averaged = 0;
  int samples_averaged = 0;
  int seeds_averaged = 0;            // seeds whose attention entered the mean
  int seeds_trained = 0;             // candidate seeds trained in total
  std::vector<uint64_t> seeds_used;  // accepted seeds, in training order

  std::string to_csv() const;
  std::string to_edge_list_csv() const;  // target,source,score rows for plotting
};

/// Ground-truth signed edges: +1 activatory, -1 inhibitory, 0 absent.
struct GroundTruthSigns {
  std::vector<std::string> genes;
  std::vector<std::vector<int>> sign;  // [target][source]

  /// Signs implied by a pathway config's activatory/inhibitory edge lists.
  static GroundTruthSigns from_config(const PathwayConfig& cfg);
};

/// How features/targets are standardized before discovery training. Keeping
/// distinct per-gene levels in the standardized values is what lets additive
/// attention tell the genes apart, so discovery defaults to per-gene scale
/// normalization around a shared center instead of the per-gene z-scoring
/// used for forecasting.
enum class DiscoveryStandardization {
  kPooled,          // one mean/sd across all genes
  kPerGene,         // independent z-score per gene (erases gene identity)
  kScaledShared,    // per-gene sd scaling, shared center (default)
};

/// Per-seed orientation check. Tanh attention has a near loss-neutral sign
/// gauge (negating a head's projection and attention halves flips its raw
/// scores without changing predictions much), so individual training runs can
/// land on sign-inverted attention. A run's finite-difference input-output
/// sensitivities are gauge-free, so a seed whose attention signs contradict
/// its own sensitivities on confidently-nonzero pairs is a flipped run and is
/// excluded from the seed mean. The check never consults ground-truth edges.
struct OrientationFilter {
  bool enabled = true;
  double score_min = 0.05;        // |attention score| for a pair to be testable
  double sensitivity_min = 0.02;  // |FD sensitivity| for a pair to be testable
  int min_tested = 3;             // fewer testable pairs => inconclusive, reject
  double probe_eps = 0.01;        // FD bump on standardized lag features
  int probe_samples = 64;         // samples used for the FD probe
};

struct DiscoveryConfig {
  GatConfig gat = default_gat();      // attention forced to tanh
  TrainConfig train = default_train();
  OrientationFilter filter;

  /// Tanh-attention model tuned for sign extraction (near-linear leaky slope
  /// keeps raw scores sign-interpretable).
  static GatConfig default_gat();
  /// Fixed-length pooled training: no validation split or early stopping, so
  /// every seed sees the identical schedule.
  static TrainConfig default_train();
  bool include_self_loops = true;
  DiscoveryStandardization standardization = DiscoveryStandardization::kScaledShared;
  std::vector<uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
};

/// Standardizes lag features and targets (gene levels only; time gaps and
/// condition one-hots pass through) according to `mode`.
std::vector<Sample> standardize_for_discovery(const std::vector<Sample>& samples,
                                              DiscoveryStandardization mode);

/// Trains on all conditions pooled (no hold-out) with a fully connected
/// single-relation graph and tanh attention, then averages eval-mode
/// attention over samples, heads, and seeds.
SignedInteractionMatrix discover(const std::vector<Sample>& samples,
                                 const std::vector<std::string>& genes,
                                 const DiscoveryConfig& cfg);

struct EdgeVerdict {
  std::string source, target;
  int true_sign = 0;
  double learned = 0.0;
  bool correct = false;
};

struct SignReport {
  std::vector<EdgeVerdict> edges;  // true edges only
  int num_correct = 0;
  bool tp53_main_activator_of_mdm2 = false;  // magnitude-ranking check
  std::vector<std::string> below_threshold_absent;  // absent pairs under threshold

  std::string to_text() const;
};

/// Per true edge: correct iff sign(learned) == truth and |learned| >= threshold.
SignReport compare_signs(const SignedInteractionMatrix& learned, const GroundTruthSigns& truth,
                         double threshold);

}  // namespace pathgat

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pathgat/dataset.hpp"
#include "pathgat/graph.hpp"
#include "pathgat/model.hpp"

namespace pathgat {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  AdamConfig adam;
  int epochs = 2000;
  int patience = 200;            // early stop on the validation split
  double validation_fraction = 0.2;  // carved from the training conditions only
  std::vector<uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);
};

/// Adam optimizer over a model's parameter tensors.
class Adam {
 public:
  Adam(std::vector<Tensor>& params, const AdamConfig& cfg);
  void step();

 private:
  std::vector<Tensor>* params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  long t_ = 0;
};

struct TrainResult {
  std::vector<double> loss_curve;  // per-epoch training MSE
  int epochs_run = 0;
};

/// Minimizes the mean over samples and genes of squared standardized error.
/// Samples must already be standardized. Deterministic given cfg and seed.
TrainResult train_gat(GatModel& model, Tape& tape, const PathwayGraph& graph,
                      const std::vector<Sample>& train_samples, const TrainConfig& cfg,
                      uint64_t seed, const std::vector<Sample>* validation = nullptr);

TrainResult train_mlp(MlpModel& model, Tape& tape, const std::vector<Sample>& train_samples,
                      const TrainConfig& cfg, uint64_t seed,
                      const std::vector<Sample>* validation = nullptr);

/// Eval-mode MSE over samples and genes, in standardized space.
double evaluate_gat(const GatModel& model, Tape& tape, const PathwayGraph& graph,
                    const std::vector<Sample>& test_samples);
double evaluate_mlp(const MlpModel& model, Tape& tape, const std::vector<Sample>& test_samples);

/// Converts a standardized sample to the N x F feature tensor / N x 1 target.
Tensor sample_features(const Sample& s);
Tensor sample_target(const Sample& s);

enum class ModelKind { kGat, kMlp };

struct ModelSpec {
  ModelKind kind = ModelKind::kGat;
  GatConfig gat;
  MlpConfig mlp;
};

struct LocoRun {
  Condition held_out;
  uint64_t seed;
  double test_mse;
};

/// Per-fold, per-seed MSE table with mean +- std aggregation. The overall
/// mean is the mean of the fold means.
struct LocoReport {
  std::vector<LocoRun> runs;

  std::vector<Condition> folds() const;
  double fold_mean(Condition c) const;
  double fold_std(Condition c) const;
  double overall_mean() const;
  double overall_std() const;  // std of per-seed overall means across seeds

  std::string to_csv() const;
  std::string to_table(const std::string& title) const;
};

/// Full LOCO experiment: per fold x seed, train on the two remaining
/// conditions and evaluate on the held-out one. Interventions keyed by the
/// held-out condition's name are applied to the test-time graph only.
LocoReport run_loco(const std::vector<Sample>& samples, const PathwayGraph& graph,
                    const ModelSpec& spec, const TrainConfig& cfg,
                    const std::map<std::string, std::vector<Intervention>>& interventions = {},
                    int jobs = 1);

}  // namespace pathgat

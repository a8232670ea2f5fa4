#pragma once

#include <random>
#include <string>
#include <vector>

#include "pathgat/graph.hpp"
#include "pathgat/tensor.hpp"

namespace pathgat {

enum class AttentionActivation { kSoftmax, kTanh };

struct GatConfig {
  int heads = 4;
  int head_dim = 8;
  int feature_dim = 9;
  double dropout_feat = 0.1;
  double dropout_attn = 0.1;
  double leaky_slope = 0.2;
  AttentionActivation attention = AttentionActivation::kSoftmax;
  bool readout_bias = true;
  uint64_t seed = 0;
};

/// Xavier-uniform tensor in +-sqrt(6/(fan_in+fan_out)), deterministic per seed.
Tensor xavier_init(const std::vector<std::size_t>& shape, std::mt19937_64& rng);

/// Relation-typed multi-head graph attention model. Per (relation, head):
/// a projection F x D and an attention vector of length 2D; head outputs are
/// concatenated within and then across relations, and a linear readout maps
/// each node's R*H*D embedding to one prediction.
class GatModel {
 public:
  GatModel(const GatConfig& cfg, std::size_t num_relations, Tape& tape);

  const GatConfig& config() const { return cfg_; }
  std::size_t num_relations() const { return num_relations_; }

  /// x: N x F node features. Returns N x 1 predictions.
  Tensor forward(const PathwayGraph& g, const Tensor& x, bool train_mode,
                 std::mt19937_64& rng) const;

  /// Eval-mode attention matrices used by forward, per (relation, head);
  /// masked entries are exactly 0.
  std::vector<std::vector<Tensor>> extract_attention(const PathwayGraph& g,
                                                     const Tensor& x) const;

  std::vector<Tensor>& parameters() { return params_; }
  const std::vector<Tensor>& parameters() const { return params_; }
  std::size_t parameter_count() const;

  std::string checkpoint_json() const;
  void load_checkpoint_json(const std::string& text);

 private:
  Tensor projection(std::size_t relation, std::size_t head) const;
  Tensor attention_vec(std::size_t relation, std::size_t head) const;
  std::pair<Tensor, Tensor> slice_attention(std::size_t relation, std::size_t head) const;

  GatConfig cfg_;
  std::size_t num_relations_;
  // layout: per relation r, per head h: W then a; then readout weight, bias
  std::vector<Tensor> params_;
};

struct MlpConfig {
  std::vector<int> hidden = {64};
  int input_dim = 27;  // N * F, flattened
  int output_dim = 3;
  uint64_t seed = 0;
};

/// Bag-of-genes baseline: feed-forward network on the flattened node
/// features, tanh hidden activations, linear output.
class MlpModel {
 public:
  MlpModel(const MlpConfig& cfg, Tape& tape);

  const MlpConfig& config() const { return cfg_; }

  /// x: N x F node features (flattened internally). Returns N x 1.
  Tensor forward(const Tensor& x, bool train_mode, std::mt19937_64& rng) const;

  std::vector<Tensor>& parameters() { return params_; }
  const std::vector<Tensor>& parameters() const { return params_; }

  std::string checkpoint_json() const;
  void load_checkpoint_json(const std::string& text);

 private:
  MlpConfig cfg_;
  std::vector<Tensor> params_;  // W0, b0, W1, b1, ...
};

}  // namespace pathgat

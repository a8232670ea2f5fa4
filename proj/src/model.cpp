#include "pathgat/model.hpp"

#include <cmath>

#include <json.hpp>

namespace pathgat {

Tensor xavier_init(const std::vector<std::size_t>& shape, std::mt19937_64& rng) {
  if (shape.empty() || shape.size() > 2)
    throw ShapeError("xavier_init: expected 1- or 2-d shape");
  const double fan_in = static_cast<double>(shape[0]);
  const double fan_out = static_cast<double>(shape.size() == 2 ? shape[1] : shape[0]);
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> unif(-limit, limit);
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  std::vector<double> data(n);
  for (auto& v : data) v = unif(rng);
  return Tensor(shape, std::move(data));
}

namespace {

Tensor xavier_param(const std::vector<std::size_t>& shape, std::mt19937_64& rng, Tape& tape) {
  Tensor t = xavier_init(shape, rng);
  return Tensor::param(t.shape(), t.data(), tape);
}

}  // namespace

GatModel::GatModel(const GatConfig& cfg, std::size_t num_relations, Tape& tape)
    : cfg_(cfg), num_relations_(num_relations) {
  const std::size_t F = cfg.feature_dim, D = cfg.head_dim;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t r = 0; r < num_relations_; ++r)
    for (int h = 0; h < cfg.heads; ++h) {
      params_.push_back(xavier_param({F, D}, rng, tape));       // projection
      params_.push_back(xavier_param({2 * D, 1}, rng, tape));   // attention vector
    }
  params_.push_back(xavier_param({num_relations_ * cfg.heads * D, 1}, rng, tape));  // readout
  params_.push_back(Tensor::param({1}, {0.0}, tape));                               // bias
}

std::size_t GatModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

Tensor GatModel::projection(std::size_t relation, std::size_t head) const {
  return params_[2 * (relation * cfg_.heads + head)];
}

Tensor GatModel::attention_vec(std::size_t relation, std::size_t head) const {
  return params_[2 * (relation * cfg_.heads + head) + 1];
}

Tensor GatModel::forward(const PathwayGraph& g, const Tensor& x, bool train_mode,
                         std::mt19937_64& rng) const {
  if (g.num_relations() != num_relations_)
    throw ShapeError("gat_forward: graph has " + std::to_string(g.num_relations()) +
                     " relations, model expects " + std::to_string(num_relations_));
  if (x.ndim() != 2 || x.cols() != static_cast<std::size_t>(cfg_.feature_dim))
    throw ShapeError("gat_forward: features " + x.shape_str() + " do not match feature_dim " +
                     std::to_string(cfg_.feature_dim));
  const std::size_t n = x.rows();
  const Tensor ones_row = Tensor::full({1, n}, 1.0);
  const Tensor ones_col = Tensor::full({n, 1}, 1.0);

  Tensor features = train_mode ? dropout(x, cfg_.dropout_feat, true, rng) : x;

  std::vector<Tensor> head_outputs;
  for (std::size_t r = 0; r < num_relations_; ++r) {
    const Tensor mask({n, n}, g.adjacency_mask(r));
    for (int h = 0; h < cfg_.heads; ++h) {
      const Tensor proj = matmul(features, projection(r, h));  // n x D
      auto [a_tgt, a_src] = slice_attention(r, h);
      const Tensor score_tgt = matmul(proj, a_tgt);            // n x 1
      const Tensor score_src = matmul(proj, a_src);            // n x 1
      // e[i][j] = a_tgt . (W h_i) + a_src . (W h_j)
      Tensor scores = add(matmul(score_tgt, ones_row), matmul(ones_col, transpose(score_src)));
      scores = leaky_relu(scores, cfg_.leaky_slope);
      Tensor alpha = cfg_.attention == AttentionActivation::kSoftmax
                         ? masked_softmax(scores, mask)
                         : multiply(tanh_act(scores), mask);
      if (train_mode) alpha = dropout(alpha, cfg_.dropout_attn, true, rng);
      head_outputs.push_back(matmul(alpha, proj));             // n x D
    }
  }
  Tensor z = concat(head_outputs);                             // n x R*H*D
  Tensor pred = matmul(z, params_[params_.size() - 2]);        // n x 1
  if (cfg_.readout_bias) pred = add(pred, params_.back());
  return pred;
}

std::pair<Tensor, Tensor> GatModel::slice_attention(std::size_t relation, std::size_t head) const {
  const Tensor& a = params_[2 * (relation * cfg_.heads + head) + 1];
  const std::size_t d = static_cast<std::size_t>(cfg_.head_dim);
  return {slice_rows(a, 0, d), slice_rows(a, d, 2 * d)};
}

std::vector<std::vector<Tensor>> GatModel::extract_attention(const PathwayGraph& g,
                                                             const Tensor& x) const {
  const std::size_t n = x.rows();
  const Tensor ones_row = Tensor::full({1, n}, 1.0);
  const Tensor ones_col = Tensor::full({n, 1}, 1.0);
  std::vector<std::vector<Tensor>> out(num_relations_);
  for (std::size_t r = 0; r < num_relations_; ++r) {
    const Tensor mask({n, n}, g.adjacency_mask(r));
    for (int h = 0; h < cfg_.heads; ++h) {
      const Tensor proj = matmul(x, projection(r, h));
      auto [a_tgt, a_src] = slice_attention(r, h);
      Tensor scores = add(matmul(matmul(proj, a_tgt), ones_row),
                          matmul(ones_col, transpose(matmul(proj, a_src))));
      scores = leaky_relu(scores, cfg_.leaky_slope);
      Tensor alpha = cfg_.attention == AttentionActivation::kSoftmax
                         ? masked_softmax(scores, mask)
                         : multiply(tanh_act(scores), mask);
      out[r].push_back(alpha);
    }
  }
  return out;
}

namespace {
using json = nlohmann::ordered_json;

const char* activation_name(AttentionActivation a) {
  return a == AttentionActivation::kSoftmax ? "softmax" : "tanh";
}

AttentionActivation activation_from_name(const std::string& s) {
  if (s == "softmax") return AttentionActivation::kSoftmax;
  if (s == "tanh") return AttentionActivation::kTanh;
  throw DataError("unknown attention activation: " + s);
}

json params_to_json(const std::vector<Tensor>& params) {
  json arr = json::array();
  for (const auto& p : params)
    arr.push_back({{"shape", p.shape()}, {"data", p.data()}});
  return arr;
}

void params_from_json(const json& arr, std::vector<Tensor>& params) {
  if (arr.size() != params.size())
    throw DataError("checkpoint: expected " + std::to_string(params.size()) + " tensors, found " +
                    std::to_string(arr.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto shape = arr[i].at("shape").get<std::vector<std::size_t>>();
    auto data = arr[i].at("data").get<std::vector<double>>();
    if (shape != params[i].shape())
      throw DataError("checkpoint: tensor " + std::to_string(i) + " shape mismatch");
    params[i].mutable_data() = std::move(data);
  }
}

}  // namespace

std::string GatModel::checkpoint_json() const {
  json j{{"model", "gat"},
         {"config",
          {{"heads", cfg_.heads},
           {"head_dim", cfg_.head_dim},
           {"feature_dim", cfg_.feature_dim},
           {"dropout_feat", cfg_.dropout_feat},
           {"dropout_attn", cfg_.dropout_attn},
           {"leaky_slope", cfg_.leaky_slope},
           {"attention", activation_name(cfg_.attention)},
           {"readout_bias", cfg_.readout_bias},
           {"seed", cfg_.seed},
           {"relations", num_relations_}}},
         {"parameters", params_to_json(params_)}};
  return j.dump(2) + "\n";
}

void GatModel::load_checkpoint_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("model") != "gat") throw DataError("checkpoint is not a GAT model");
  const auto& c = j.at("config");
  if (c.at("heads") != cfg_.heads || c.at("head_dim") != cfg_.head_dim ||
      c.at("feature_dim") != cfg_.feature_dim || c.at("relations") != num_relations_)
    throw DataError("checkpoint config does not match model");
  params_from_json(j.at("parameters"), params_);
}

MlpModel::MlpModel(const MlpConfig& cfg, Tape& tape) : cfg_(cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<int> sizes;
  sizes.push_back(cfg.input_dim);
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(cfg.output_dim);
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    params_.push_back(xavier_param({static_cast<std::size_t>(sizes[i]),
                                    static_cast<std::size_t>(sizes[i + 1])},
                                   rng, tape));
    params_.push_back(Tensor::param({1, static_cast<std::size_t>(sizes[i + 1])},
                                    std::vector<double>(sizes[i + 1], 0.0), tape));
  }
}

Tensor MlpModel::forward(const Tensor& x, bool train_mode, std::mt19937_64& rng) const {
  (void)train_mode;
  (void)rng;
  if (x.size() != static_cast<std::size_t>(cfg_.input_dim))
    throw ShapeError("mlp_forward: input " + x.shape_str() + " does not flatten to " +
                     std::to_string(cfg_.input_dim));
  Tensor h = reshape(x, {1, static_cast<std::size_t>(cfg_.input_dim)});
  const std::size_t layers = params_.size() / 2;
  for (std::size_t l = 0; l < layers; ++l) {
    h = add(matmul(h, params_[2 * l]), params_[2 * l + 1]);
    if (l + 1 < layers) h = tanh_act(h);
  }
  return reshape(h, {static_cast<std::size_t>(cfg_.output_dim), 1});
}

std::string MlpModel::checkpoint_json() const {
  json j{{"model", "mlp"},
         {"config",
          {{"hidden", cfg_.hidden},
           {"input_dim", cfg_.input_dim},
           {"output_dim", cfg_.output_dim},
           {"seed", cfg_.seed}}},
         {"parameters", params_to_json(params_)}};
  return j.dump(2) + "\n";
}

void MlpModel::load_checkpoint_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("model") != "mlp") throw DataError("checkpoint is not an MLP model");
  const auto& c = j.at("config");
  if (c.at("input_dim") != cfg_.input_dim || c.at("output_dim") != cfg_.output_dim ||
      c.at("hidden").get<std::vector<int>>() != cfg_.hidden)
    throw DataError("checkpoint config does not match model");
  params_from_json(j.at("parameters"), params_);
}

}  // namespace pathgat

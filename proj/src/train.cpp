#include "pathgat/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace pathgat {

namespace {
using json = nlohmann::ordered_json;
}

std::string TrainConfig::to_json() const {
  json j{{"learning_rate", adam.learning_rate},
         {"beta1", adam.beta1},
         {"beta2", adam.beta2},
         {"epsilon", adam.epsilon},
         {"epochs", epochs},
         {"patience", patience},
         {"validation_fraction", validation_fraction},
         {"seeds", seeds}};
  return j.dump(2) + "\n";
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("train config parse error: ") + e.what());
  }
  TrainConfig cfg;
  if (j.contains("learning_rate")) cfg.adam.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("beta1")) cfg.adam.beta1 = j["beta1"].get<double>();
  if (j.contains("beta2")) cfg.adam.beta2 = j["beta2"].get<double>();
  if (j.contains("epsilon")) cfg.adam.epsilon = j["epsilon"].get<double>();
  if (j.contains("epochs")) cfg.epochs = j["epochs"].get<int>();
  if (j.contains("patience")) cfg.patience = j["patience"].get<int>();
  if (j.contains("validation_fraction"))
    cfg.validation_fraction = j["validation_fraction"].get<double>();
  if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<uint64_t>>();
  if (cfg.adam.learning_rate <= 0.0) throw DataError("train config: learning_rate must be > 0");
  return cfg;
}

Adam::Adam(std::vector<Tensor>& params, const AdamConfig& cfg) : params_(&params), cfg_(cfg) {
  for (const auto& p : params) {
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
  for (std::size_t k = 0; k < params_->size(); ++k) {
    Tensor& p = (*params_)[k];
    const auto& g = p.grad();
    auto& data = p.mutable_data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      m_[k][i] = cfg_.beta1 * m_[k][i] + (1.0 - cfg_.beta1) * g[i];
      v_[k][i] = cfg_.beta2 * v_[k][i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      data[i] -= cfg_.learning_rate * (m_[k][i] / bc1) / (std::sqrt(v_[k][i] / bc2) + cfg_.epsilon);
    }
  }
}

Tensor sample_features(const Sample& s) {
  std::vector<double> data;
  data.reserve(kNumGenes * kFeatureDim);
  for (int g = 0; g < kNumGenes; ++g)
    data.insert(data.end(), s.node_features[g].begin(), s.node_features[g].end());
  return Tensor({kNumGenes, kFeatureDim}, std::move(data));
}

Tensor sample_target(const Sample& s) {
  return Tensor({kNumGenes, 1}, {s.target[0], s.target[1], s.target[2]});
}

namespace {

// forward closure: sample index, train flag -> N x 1 prediction
using Forward = std::function<Tensor(const Sample&, bool, std::mt19937_64&)>;

double eval_mse(const Forward& fwd, Tape& tape, const std::vector<Sample>& samples) {
  if (samples.empty()) throw DataError("evaluate: empty sample set");
  std::mt19937_64 rng(0);  // unused in eval mode
  double total = 0.0;
  for (const auto& s : samples) {
    const Tensor pred = fwd(s, false, rng);
    const Tensor target = sample_target(s);
    for (int g = 0; g < kNumGenes; ++g) {
      const double d = pred.at(g) - target.at(g);
      total += d * d;
    }
  }
  tape.clear();
  return total / (samples.size() * kNumGenes);
}

TrainResult train_loop(const Forward& fwd, std::vector<Tensor>& params, Tape& tape,
                       const std::vector<Sample>& train_samples, const TrainConfig& cfg,
                       uint64_t seed, const std::vector<Sample>* validation) {
  if (train_samples.empty()) throw DataError("train: empty training set");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Adam opt(params, cfg.adam);
  TrainResult result;

  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  std::vector<std::vector<double>> best_params;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (auto& p : params) p.zero_grad();
    tape.clear();

    // full-batch MSE over samples and genes
    std::vector<Tensor> errs;
    errs.reserve(train_samples.size());
    for (const auto& s : train_samples) {
      Tensor pred = fwd(s, true, rng);
      Tensor diff = sub(pred, sample_target(s));
      errs.push_back(mean(multiply(diff, diff)));
    }
    Tensor loss = mean(concat(errs));
    const double loss_value = loss.value();
    if (!std::isfinite(loss_value))
      throw DivergenceError("training loss diverged at epoch " + std::to_string(epoch));
    result.loss_curve.push_back(loss_value);

    tape.backward(loss);
    opt.step();
    ++result.epochs_run;

    if (validation && cfg.patience > 0) {
      const double val = eval_mse(fwd, tape, *validation);
      if (val < best_val - 1e-12) {
        best_val = val;
        since_best = 0;
        best_params.clear();
        for (const auto& p : params) best_params.push_back(p.data());
      } else if (++since_best >= cfg.patience) {
        break;
      }
    }
  }
  if (validation && cfg.patience > 0 && !best_params.empty())
    for (std::size_t i = 0; i < params.size(); ++i) params[i].mutable_data() = best_params[i];
  tape.clear();
  return result;
}

}  // namespace

TrainResult train_gat(GatModel& model, Tape& tape, const PathwayGraph& graph,
                      const std::vector<Sample>& train_samples, const TrainConfig& cfg,
                      uint64_t seed, const std::vector<Sample>* validation) {
  Forward fwd = [&](const Sample& s, bool train, std::mt19937_64& rng) {
    return model.forward(graph, sample_features(s), train, rng);
  };
  return train_loop(fwd, model.parameters(), tape, train_samples, cfg, seed, validation);
}

TrainResult train_mlp(MlpModel& model, Tape& tape, const std::vector<Sample>& train_samples,
                      const TrainConfig& cfg, uint64_t seed,
                      const std::vector<Sample>* validation) {
  Forward fwd = [&](const Sample& s, bool train, std::mt19937_64& rng) {
    return model.forward(sample_features(s), train, rng);
  };
  return train_loop(fwd, model.parameters(), tape, train_samples, cfg, seed, validation);
}

double evaluate_gat(const GatModel& model, Tape& tape, const PathwayGraph& graph,
                    const std::vector<Sample>& test_samples) {
  Forward fwd = [&](const Sample& s, bool train, std::mt19937_64& rng) {
    return model.forward(graph, sample_features(s), train, rng);
  };
  return eval_mse(fwd, tape, test_samples);
}

double evaluate_mlp(const MlpModel& model, Tape& tape, const std::vector<Sample>& test_samples) {
  Forward fwd = [&](const Sample& s, bool train, std::mt19937_64& rng) {
    return model.forward(sample_features(s), train, rng);
  };
  return eval_mse(fwd, tape, test_samples);
}

std::vector<Condition> LocoReport::folds() const {
  std::vector<Condition> out;
  for (const auto& r : runs)
    if (std::find(out.begin(), out.end(), r.held_out) == out.end()) out.push_back(r.held_out);
  return out;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return {mean, n > 1 ? std::sqrt(var / (n - 1)) : 0.0};
}

}  // namespace

double LocoReport::fold_mean(Condition c) const {
  std::vector<double> xs;
  for (const auto& r : runs)
    if (r.held_out == c) xs.push_back(r.test_mse);
  return mean_std(xs).first;
}

double LocoReport::fold_std(Condition c) const {
  std::vector<double> xs;
  for (const auto& r : runs)
    if (r.held_out == c) xs.push_back(r.test_mse);
  return mean_std(xs).second;
}

double LocoReport::overall_mean() const {
  double total = 0.0;
  const auto fs = folds();
  for (Condition c : fs) total += fold_mean(c);
  return total / fs.size();
}

double LocoReport::overall_std() const {
  // per-seed overall mean (mean across folds at fixed seed), then std
  std::map<uint64_t, std::vector<double>> by_seed;
  for (const auto& r : runs) by_seed[r.seed].push_back(r.test_mse);
  std::vector<double> seed_means;
  for (const auto& [seed, xs] : by_seed) seed_means.push_back(mean_std(xs).first);
  return mean_std(seed_means).second;
}

std::string LocoReport::to_csv() const {
  std::ostringstream os;
  os << "fold,seed,test_mse\n";
  char buf[64];
  for (const auto& r : runs) {
    std::snprintf(buf, sizeof buf, "%.12g", r.test_mse);
    os << condition_name(r.held_out) << ',' << r.seed << ',' << buf << '\n';
  }
  return os.str();
}

std::string LocoReport::to_table(const std::string& title) const {
  std::ostringstream os;
  os << title << "\n";
  char line[128];
  os << "Fold (hold-out)    MSE (mean+-std)\n";
  for (Condition c : folds()) {
    std::snprintf(line, sizeof line, "%-18s %.4g +- %.4g\n", condition_name(c).c_str(),
                  fold_mean(c), fold_std(c));
    os << line;
  }
  std::snprintf(line, sizeof line, "%-18s %.4g +- %.4g\n", "Overall mean", overall_mean(),
                overall_std());
  os << line;
  return os.str();
}

namespace {

// deterministic validation carve-out from the training samples
void split_validation(const std::vector<Sample>& all, double fraction, uint64_t seed,
                      std::vector<Sample>& train, std::vector<Sample>& val) {
  std::vector<std::size_t> idx(all.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed ^ 0xa5a5a5a5ULL);
  std::shuffle(idx.begin(), idx.end(), rng);
  const std::size_t n_val = std::max<std::size_t>(1, static_cast<std::size_t>(all.size() * fraction));
  for (std::size_t i = 0; i < idx.size(); ++i)
    (i < n_val ? val : train).push_back(all[idx[i]]);
}

LocoRun run_single(const LocoFold& fold, const PathwayGraph& train_graph,
                   const PathwayGraph& test_graph, const ModelSpec& spec, const TrainConfig& cfg,
                   uint64_t seed) {
  const std::vector<Sample> std_train_all = fold.standardized_train();
  const std::vector<Sample> std_test = fold.standardized_test();
  std::vector<Sample> std_train, std_val;
  if (cfg.patience > 0 && cfg.validation_fraction > 0.0)
    split_validation(std_train_all, cfg.validation_fraction, seed, std_train, std_val);
  else
    std_train = std_train_all;
  const std::vector<Sample>* val = std_val.empty() ? nullptr : &std_val;

  Tape tape;
  double mse;
  if (spec.kind == ModelKind::kGat) {
    GatConfig mc = spec.gat;
    mc.seed = seed;
    GatModel model(mc, train_graph.num_relations(), tape);
    train_gat(model, tape, train_graph, std_train, cfg, seed, val);
    mse = evaluate_gat(model, tape, test_graph, std_test);
  } else {
    MlpConfig mc = spec.mlp;
    mc.seed = seed;
    MlpModel model(mc, tape);
    train_mlp(model, tape, std_train, cfg, seed, val);
    mse = evaluate_mlp(model, tape, std_test);
  }
  return {fold.held_out, seed, mse};
}

}  // namespace

LocoReport run_loco(const std::vector<Sample>& samples, const PathwayGraph& graph,
                    const ModelSpec& spec, const TrainConfig& cfg,
                    const std::map<std::string, std::vector<Intervention>>& interventions,
                    int jobs) {
  const std::vector<LocoFold> folds = loco_folds(samples);
  struct Job {
    const LocoFold* fold;
    PathwayGraph test_graph;
    uint64_t seed;
  };
  std::vector<Job> queue;
  for (const auto& fold : folds) {
    PathwayGraph test_graph = graph;
    auto it = interventions.find(condition_name(fold.held_out));
    if (it != interventions.end()) test_graph = graph.with_interventions(it->second);
    for (uint64_t seed : cfg.seeds) queue.push_back({&fold, test_graph, seed});
  }

  std::vector<LocoRun> results(queue.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < queue.size(); ++i)
      results[i] = run_single(*queue[i].fold, graph, queue[i].test_graph, spec, cfg, queue[i].seed);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t i = next.fetch_add(1); i < queue.size(); i = next.fetch_add(1))
        results[i] =
            run_single(*queue[i].fold, graph, queue[i].test_graph, spec, cfg, queue[i].seed);
    };
    std::vector<std::future<void>> futures;
    for (int j = 0; j < jobs; ++j) futures.push_back(std::async(std::launch::async, worker));
    for (auto& f : futures) f.get();
  }

  LocoReport report;
  report.runs = std::move(results);
  return report;
}

}  // namespace pathgat

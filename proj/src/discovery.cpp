#include "pathgat/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pathgat {

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

GatConfig DiscoveryConfig::default_gat() {
  GatConfig g;
  g.heads = 4;
  g.head_dim = 8;
  g.leaky_slope = 0.9;
  g.attention = AttentionActivation::kTanh;
  return g;
}

TrainConfig DiscoveryConfig::default_train() {
  TrainConfig t;
  t.adam.learning_rate = 3e-3;
  t.epochs = 2000;
  t.patience = 0;
  t.validation_fraction = 0.0;
  return t;
}

std::string SignedInteractionMatrix::to_csv() const {
  std::ostringstream os;
  os << "target_gene";
  for (const auto& g : genes) os << ",from_" << g;
  os << '\n';
  for (std::size_t i = 0; i < genes.size(); ++i) {
    os << genes[i];
    for (std::size_t j = 0; j < genes.size(); ++j) os << ',' << format_value(score[i][j]);
    os << '\n';
  }
  return os.str();
}

std::string SignedInteractionMatrix::to_edge_list_csv() const {
  std::ostringstream os;
  os << "source,target,score,is_self\n";
  for (std::size_t i = 0; i < genes.size(); ++i)
    for (std::size_t j = 0; j < genes.size(); ++j)
      os << genes[j] << ',' << genes[i] << ',' << format_value(score[i][j]) << ','
         << (i == j ? 1 : 0) << '\n';
  return os.str();
}

GroundTruthSigns GroundTruthSigns::from_config(const PathwayConfig& cfg) {
  GroundTruthSigns truth;
  truth.genes = cfg.genes;
  const std::size_t n = cfg.genes.size();
  truth.sign.assign(n, std::vector<int>(n, 0));
  auto index = [&](const std::string& g) {
    auto it = std::find(cfg.genes.begin(), cfg.genes.end(), g);
    if (it == cfg.genes.end()) throw DataError("ground truth: unknown gene " + g);
    return static_cast<std::size_t>(it - cfg.genes.begin());
  };
  for (const auto& [source, target, relation] : cfg.edges) {
    if (relation == "activatory")
      truth.sign[index(target)][index(source)] = 1;
    else if (relation == "inhibitory")
      truth.sign[index(target)][index(source)] = -1;
  }
  return truth;
}

std::vector<Sample> standardize_for_discovery(const std::vector<Sample>& samples,
                                              DiscoveryStandardization mode) {
  if (samples.empty()) throw DataError("standardize_for_discovery: empty dataset");
  if (mode == DiscoveryStandardization::kPerGene) {
    const Standardizer st = Standardizer::fit(samples);
    std::vector<Sample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(st.transform(s));
    return out;
  }

  // per-gene moments over all lag values and targets
  double mean_g[kNumGenes] = {}, sd_g[kNumGenes] = {};
  for (int g = 0; g < kNumGenes; ++g) {
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (const auto& s : samples) {
      for (int k = 0; k < kWindowLen; ++k) {
        sum += s.node_features[g][k];
        sq += s.node_features[g][k] * s.node_features[g][k];
        ++n;
      }
      sum += s.target[g];
      sq += s.target[g] * s.target[g];
      ++n;
    }
    mean_g[g] = sum / static_cast<double>(n);
    const double var = sq / static_cast<double>(n) - mean_g[g] * mean_g[g];
    sd_g[g] = var > 1e-16 ? std::sqrt(var) : 1.0;
  }

  double scale[kNumGenes], center[kNumGenes];
  if (mode == DiscoveryStandardization::kPooled) {
    // one mean/sd across genes: pooled moments of the raw values
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (const auto& s : samples)
      for (int g = 0; g < kNumGenes; ++g) {
        for (int k = 0; k < kWindowLen; ++k) {
          sum += s.node_features[g][k];
          sq += s.node_features[g][k] * s.node_features[g][k];
          ++n;
        }
        sum += s.target[g];
        sq += s.target[g] * s.target[g];
        ++n;
      }
    const double mu = sum / static_cast<double>(n);
    const double var = sq / static_cast<double>(n) - mu * mu;
    const double sd = var > 1e-16 ? std::sqrt(var) : 1.0;
    for (int g = 0; g < kNumGenes; ++g) {
      scale[g] = sd;
      center[g] = mu;
    }
  } else {
    // kScaledShared: per-gene sd, then one shared center of the scaled values
    double sum = 0.0;
    for (int g = 0; g < kNumGenes; ++g) sum += mean_g[g] / sd_g[g];
    const double mu = sum / kNumGenes;
    for (int g = 0; g < kNumGenes; ++g) {
      scale[g] = sd_g[g];
      center[g] = mu * sd_g[g];
    }
  }

  std::vector<Sample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    Sample z = s;
    for (int g = 0; g < kNumGenes; ++g) {
      for (int k = 0; k < kWindowLen; ++k)
        z.node_features[g][k] = (s.node_features[g][k] - center[g]) / scale[g];
      z.target[g] = (s.target[g] - center[g]) / scale[g];
    }
    out.push_back(z);
  }
  return out;
}

namespace {

using Matrix = std::vector<std::vector<double>>;

// Mean over samples and heads of this seed's eval-mode attention.
Matrix seed_score_matrix(const GatModel& model, const PathwayGraph& graph,
                         const std::vector<Sample>& samples, Tape& tape) {
  const std::size_t n = graph.num_genes();
  Matrix m(n, std::vector<double>(n, 0.0));
  std::size_t matrices = 0;
  for (const auto& s : samples) {
    const auto alphas = model.extract_attention(graph, sample_features(s));
    for (const auto& per_head : alphas)
      for (const Tensor& alpha : per_head) {
        ++matrices;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) m[i][j] += alpha.at(i, j);
      }
    tape.clear();
  }
  const double denom = static_cast<double>(matrices);
  for (auto& row : m)
    for (auto& v : row) v /= denom;
  return m;
}

// Eval-mode finite-difference sensitivity of prediction i to gene j's lag
// features, averaged over a sample subset. Gauge-free by construction.
Matrix fd_sensitivities(const GatModel& model, const PathwayGraph& graph,
                        const std::vector<Sample>& samples, const OrientationFilter& f,
                        Tape& tape) {
  const std::size_t n = graph.num_genes();
  Matrix g(n, std::vector<double>(n, 0.0));
  std::mt19937_64 rng(0);  // unused in eval mode
  const std::size_t count =
      std::min<std::size_t>(samples.size(), static_cast<std::size_t>(f.probe_samples));
  for (std::size_t k = 0; k < count; ++k) {
    const Tensor x = sample_features(samples[k]);
    const Tensor base = model.forward(graph, x, false, rng);
    std::vector<double> base_pred(n);
    for (std::size_t i = 0; i < n; ++i) base_pred[i] = base.at(i, 0);
    tape.clear();
    for (std::size_t j = 0; j < n; ++j) {
      Tensor bumped(x.shape(), x.data());  // deep copy; Tensor copies share storage
      for (int lag = 0; lag < kWindowLen; ++lag)
        bumped.mutable_data()[j * kFeatureDim + lag] += f.probe_eps;
      const Tensor pred = model.forward(graph, bumped, false, rng);
      for (std::size_t i = 0; i < n; ++i)
        g[i][j] += (pred.at(i, 0) - base_pred[i]) / f.probe_eps;
      tape.clear();
    }
  }
  for (auto& row : g)
    for (auto& v : row) v /= static_cast<double>(count);
  return g;
}

// A pair is testable when both the attention score and the sensitivity are
// confidently nonzero; a testable sign disagreement marks a flipped run.
bool orientation_consistent(const Matrix& score, const Matrix& sens, const OrientationFilter& f) {
  const std::size_t n = score.size();
  int tested = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (std::abs(score[i][j]) < f.score_min || std::abs(sens[i][j]) < f.sensitivity_min)
        continue;
      ++tested;
      if ((score[i][j] > 0) != (sens[i][j] > 0)) return false;
    }
  return tested >= f.min_tested;
}

}  // namespace

SignedInteractionMatrix discover(const std::vector<Sample>& samples,
                                 const std::vector<std::string>& genes,
                                 const DiscoveryConfig& cfg) {
  if (samples.empty()) throw DataError("discover: empty dataset");
  const std::size_t n = genes.size();
  PathwayGraph graph = PathwayGraph::fully_connected(genes, cfg.include_self_loops);

  // discovery trains on everything pooled; standardize on the full set
  const std::vector<Sample> std_samples = standardize_for_discovery(samples, cfg.standardization);

  std::vector<Matrix> per_seed;
  std::vector<uint64_t> accepted;
  for (uint64_t seed : cfg.seeds) {
    Tape tape;
    GatConfig gc = cfg.gat;
    gc.attention = AttentionActivation::kTanh;
    gc.seed = seed;
    GatModel model(gc, graph.num_relations(), tape);
    train_gat(model, tape, graph, std_samples, cfg.train, seed, nullptr);

    Matrix m = seed_score_matrix(model, graph, std_samples, tape);
    bool keep = true;
    if (cfg.filter.enabled) {
      const Matrix sens = fd_sensitivities(model, graph, std_samples, cfg.filter, tape);
      keep = orientation_consistent(m, sens, cfg.filter);
    }
    per_seed.push_back(std::move(m));
    if (keep) accepted.push_back(seed);
  }

  SignedInteractionMatrix out;
  out.genes = genes;
  out.score.assign(n, std::vector<double>(n, 0.0));
  out.heads_averaged = cfg.gat.heads;
  out.samples_averaged = static_cast<int>(samples.size());
  out.seeds_trained = static_cast<int>(cfg.seeds.size());

  // all seeds flipped/inconclusive: fall back to the unfiltered mean
  std::vector<std::size_t> used;
  for (std::size_t k = 0; k < cfg.seeds.size(); ++k)
    if (!cfg.filter.enabled ||
        std::find(accepted.begin(), accepted.end(), cfg.seeds[k]) != accepted.end())
      used.push_back(k);
  if (used.empty())
    for (std::size_t k = 0; k < cfg.seeds.size(); ++k) used.push_back(k);

  for (std::size_t k : used) {
    out.seeds_used.push_back(cfg.seeds[k]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.score[i][j] += per_seed[k][i][j];
  }
  out.seeds_averaged = static_cast<int>(used.size());
  for (auto& row : out.score)
    for (auto& v : row) v /= static_cast<double>(used.size());
  return out;
}

SignReport compare_signs(const SignedInteractionMatrix& learned, const GroundTruthSigns& truth,
                         double threshold) {
  if (learned.genes != truth.genes)
    throw DataError("compare_signs: gene sets differ");
  const std::size_t n = truth.genes.size();
  SignReport report;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = learned.score[i][j];
      if (truth.sign[i][j] != 0) {
        EdgeVerdict e;
        e.source = truth.genes[j];
        e.target = truth.genes[i];
        e.true_sign = truth.sign[i][j];
        e.learned = v;
        e.correct = std::abs(v) >= threshold &&
                    ((v > 0 && e.true_sign > 0) || (v < 0 && e.true_sign < 0));
        if (e.correct) ++report.num_correct;
        report.edges.push_back(e);
      } else if (std::abs(v) < threshold) {
        report.below_threshold_absent.push_back(truth.genes[j] + "->" + truth.genes[i]);
      }
    }

  // magnitude ranking: among positive incoming scores of MDM2, TP53 largest
  auto gene_index = [&](const std::string& g) {
    auto it = std::find(truth.genes.begin(), truth.genes.end(), g);
    return it == truth.genes.end() ? n : static_cast<std::size_t>(it - truth.genes.begin());
  };
  const std::size_t mdm2 = gene_index("MDM2"), tp53 = gene_index("TP53");
  if (mdm2 < n && tp53 < n) {
    bool largest = learned.score[mdm2][tp53] > 0;
    for (std::size_t j = 0; j < n && largest; ++j)
      if (j != tp53 && j != mdm2 && learned.score[mdm2][j] > learned.score[mdm2][tp53])
        largest = false;
    report.tp53_main_activator_of_mdm2 = largest;
  }
  return report;
}

std::string SignReport::to_text() const {
  std::ostringstream os;
  os << "Sign recovery: " << num_correct << "/" << edges.size() << " true edges correct\n";
  for (const auto& e : edges)
    os << "  " << e.source << "->" << e.target << " truth " << (e.true_sign > 0 ? "+" : "-")
       << " learned " << format_value(e.learned) << (e.correct ? "  OK" : "  WRONG") << '\n';
  os << "TP53 main activator of MDM2: " << (tp53_main_activator_of_mdm2 ? "yes" : "no") << '\n';
  os << "Absent pairs below threshold:";
  if (below_threshold_absent.empty())
    os << " none";
  else
    for (const auto& p : below_threshold_absent) os << ' ' << p;
  os << '\n';
  return os.str();
}

}  // namespace pathgat

#include "pathgat/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace pathgat {

namespace {
using json = nlohmann::ordered_json;

json gat_to_json(const GatConfig& g) {
  return json{{"heads", g.heads},
              {"head_dim", g.head_dim},
              {"dropout_feat", g.dropout_feat},
              {"dropout_attn", g.dropout_attn},
              {"leaky_slope", g.leaky_slope},
              {"readout_bias", g.readout_bias}};
}

void gat_from_json(const json& j, GatConfig& g) {
  if (j.contains("heads")) g.heads = j["heads"].get<int>();
  if (j.contains("head_dim")) g.head_dim = j["head_dim"].get<int>();
  if (j.contains("dropout_feat")) g.dropout_feat = j["dropout_feat"].get<double>();
  if (j.contains("dropout_attn")) g.dropout_attn = j["dropout_attn"].get<double>();
  if (j.contains("leaky_slope")) g.leaky_slope = j["leaky_slope"].get<double>();
  if (j.contains("readout_bias")) g.readout_bias = j["readout_bias"].get<bool>();
}

}  // namespace

SimConfig ExperimentConfig::default_discovery_sim() {
  SimConfig sim;
  sim.duration_h = 2.5;
  sim.sample_times.clear();
  for (double t = 0.0; t <= 2.5 + 1e-9; t += 0.5) sim.sample_times.push_back(t);
  sim.init_jitter_sd = 1.0;  // spread starting states to decorrelate the genes
  sim.noise_sd = 0.0;        // noiseless by default; callers may restore noise
  return sim;
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["pathway"] = json::parse(pathway.to_json());
  if (data_csv) j["data_csv"] = *data_csv;
  j["sim"] = json::parse(sim.to_json());
  j["sim_replicates"] = sim_replicates;
  j["model_kind"] = model_kind;
  j["gat"] = gat_to_json(gat);
  j["mlp"] = json{{"hidden", mlp.hidden}};
  j["train"] = json::parse(train.to_json());
  j["discovery"] = json{{"threshold", discovery_threshold},
                        {"include_self_loops", discovery.include_self_loops},
                        {"gat", gat_to_json(discovery.gat)},
                        {"train", json::parse(discovery.train.to_json())},
                        {"seeds", discovery.seeds},
                        {"sim", json::parse(discovery_sim.to_json())},
                        {"replicates", discovery_replicates}};
  j["apply_interventions"] = apply_interventions;
  return j.dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("experiment config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  if (j.contains("pathway")) {
    if (j["pathway"].is_string())
      cfg.pathway = PathwayConfig::load(j["pathway"].get<std::string>());
    else
      cfg.pathway = PathwayConfig::from_json(j["pathway"].dump());
  }
  if (j.contains("data_csv") && !j["data_csv"].is_null())
    cfg.data_csv = j["data_csv"].get<std::string>();
  if (j.contains("sim")) {
    if (j["sim"].is_string())
      cfg.sim = SimConfig::load(j["sim"].get<std::string>());
    else
      cfg.sim = SimConfig::from_json(j["sim"].dump());
  } else {
    cfg.sim.sample_times = SimConfig::default_sample_times();
  }
  if (j.contains("sim_replicates")) cfg.sim_replicates = j["sim_replicates"].get<int>();
  if (j.contains("model_kind")) cfg.model_kind = j["model_kind"].get<std::string>();
  if (cfg.model_kind != "gat" && cfg.model_kind != "mlp" && cfg.model_kind != "both")
    throw DataError("model_kind must be gat, mlp, or both");
  if (j.contains("gat")) gat_from_json(j["gat"], cfg.gat);
  if (j.contains("mlp") && j["mlp"].contains("hidden"))
    cfg.mlp.hidden = j["mlp"]["hidden"].get<std::vector<int>>();
  if (j.contains("train")) cfg.train = TrainConfig::from_json(j["train"].dump());
  if (j.contains("discovery")) {
    const auto& d = j["discovery"];
    if (d.contains("threshold")) cfg.discovery_threshold = d["threshold"].get<double>();
    if (d.contains("include_self_loops"))
      cfg.discovery.include_self_loops = d["include_self_loops"].get<bool>();
    if (d.contains("gat")) gat_from_json(d["gat"], cfg.discovery.gat);
    if (d.contains("train")) cfg.discovery.train = TrainConfig::from_json(d["train"].dump());
    if (d.contains("seeds")) cfg.discovery.seeds = d["seeds"].get<std::vector<uint64_t>>();
    if (d.contains("sim")) cfg.discovery_sim = SimConfig::from_json(d["sim"].dump());
    if (d.contains("replicates")) cfg.discovery_replicates = d["replicates"].get<int>();
  }
  if (j.contains("apply_interventions"))
    cfg.apply_interventions = j["apply_interventions"].get<bool>();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open experiment config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string ExperimentConfig::hash() const {
  const std::string text = to_json();
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<Trajectory> ExperimentConfig::load_or_simulate() const {
  if (data_csv) return read_trajectories(*data_csv);
  return generate_dataset(sim, sim_replicates);
}

std::vector<Trajectory> ExperimentConfig::load_or_simulate_discovery() const {
  if (data_csv) return read_trajectories(*data_csv);
  return generate_dataset(discovery_sim, discovery_replicates);
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

void stamp_run(const fs::path& dir, const ExperimentConfig& cfg) {
  write_file(dir / "resolved_config.json", cfg.to_json());
  std::ostringstream os;
  os << "config_hash=" << cfg.hash() << "\nseeds=";
  for (std::size_t i = 0; i < cfg.train.seeds.size(); ++i)
    os << (i ? "," : "") << cfg.train.seeds[i];
  os << "\n";
  write_file(dir / "run_info.txt", os.str());
}

ExperimentConfig apply_cli(const ExperimentConfig& base, const CliOptions& opts) {
  ExperimentConfig cfg = base;
  if (opts.seeds) {
    cfg.train.seeds.clear();
    for (int s = 0; s < *opts.seeds; ++s) cfg.train.seeds.push_back(static_cast<uint64_t>(s));
    cfg.discovery.seeds = cfg.train.seeds;
  }
  if (opts.threshold) cfg.discovery_threshold = *opts.threshold;
  for (const auto& spec : opts.intervene) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() < 4 || parts.size() > 5)
      throw DataError("--intervene expects relation:src:dst:remove|add[:condition], got " + spec);
    Intervention iv;
    iv.relation = parts[0];
    iv.source_gene = parts[1];
    iv.target_gene = parts[2];
    if (parts[3] == "remove")
      iv.action = Intervention::Action::kRemove;
    else if (parts[3] == "add")
      iv.action = Intervention::Action::kAdd;
    else
      throw DataError("--intervene action must be remove or add, got " + parts[3]);
    const std::string condition = parts.size() == 5 ? parts[4] : "Nutlin";
    cfg.pathway.interventions[condition].push_back(iv);
  }
  return cfg;
}

}  // namespace

int cmd_simulate(const ExperimentConfig& base, const CliOptions& opts) {
  const ExperimentConfig cfg = apply_cli(base, opts);
  fs::create_directories(opts.out_dir);
  const std::vector<Trajectory> trajs = cfg.load_or_simulate();
  for (const auto& t : trajs) {
    const std::string name =
        "traj_" + condition_name(t.condition) + "_" + std::to_string(t.replicate_id) + ".csv";
    write_file(fs::path(opts.out_dir) / name, trajectories_to_csv({t}));
  }
  write_file(fs::path(opts.out_dir) / "all_trajectories.csv", trajectories_to_csv(trajs));
  stamp_run(opts.out_dir, cfg);
  std::cout << "wrote " << trajs.size() << " trajectories to " << opts.out_dir << "\n";
  return kExitOk;
}

int cmd_train(const ExperimentConfig& base, const CliOptions& opts) {
  const ExperimentConfig cfg = apply_cli(base, opts);
  fs::create_directories(opts.out_dir);
  const std::vector<Sample> samples = window_all(cfg.load_or_simulate());
  const Standardizer st = Standardizer::fit(samples);
  std::vector<Sample> std_samples;
  for (const auto& s : samples) std_samples.push_back(st.transform(s));
  const PathwayGraph graph = cfg.pathway.build();
  const uint64_t seed = cfg.train.seeds.empty() ? 0 : cfg.train.seeds.front();

  std::ostringstream curve;
  curve << "epoch,train_mse\n";
  if (cfg.model_kind == "gat" || cfg.model_kind == "both") {
    Tape tape;
    GatConfig gc = cfg.gat;
    gc.seed = seed;
    GatModel model(gc, graph.num_relations(), tape);
    TrainResult r = train_gat(model, tape, graph, std_samples, cfg.train, seed);
    for (std::size_t e = 0; e < r.loss_curve.size(); ++e) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%zu,%.12g\n", e, r.loss_curve[e]);
      curve << buf;
    }
    write_file(fs::path(opts.out_dir) / "gat_checkpoint.json", model.checkpoint_json());
    write_file(fs::path(opts.out_dir) / "gat_loss_curve.csv", curve.str());
  }
  if (cfg.model_kind == "mlp" || cfg.model_kind == "both") {
    Tape tape;
    MlpConfig mc = cfg.mlp;
    mc.seed = seed;
    MlpModel model(mc, tape);
    TrainResult r = train_mlp(model, tape, std_samples, cfg.train, seed);
    std::ostringstream mcurve;
    mcurve << "epoch,train_mse\n";
    for (std::size_t e = 0; e < r.loss_curve.size(); ++e) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%zu,%.12g\n", e, r.loss_curve[e]);
      mcurve << buf;
    }
    write_file(fs::path(opts.out_dir) / "mlp_checkpoint.json", model.checkpoint_json());
    write_file(fs::path(opts.out_dir) / "mlp_loss_curve.csv", mcurve.str());
  }
  stamp_run(opts.out_dir, cfg);
  return kExitOk;
}

int cmd_loco(const ExperimentConfig& base, const CliOptions& opts) {
  const ExperimentConfig cfg = apply_cli(base, opts);
  fs::create_directories(opts.out_dir);
  const std::vector<Sample> samples = window_all(cfg.load_or_simulate());
  const PathwayGraph graph = cfg.pathway.build();

  ModelSpec gat_spec{ModelKind::kGat, cfg.gat, cfg.mlp};
  ModelSpec mlp_spec{ModelKind::kMlp, cfg.gat, cfg.mlp};

  std::ostringstream table;
  auto run_kind = [&](const char* name, const ModelSpec& spec) {
    LocoReport plain = run_loco(samples, graph, spec, cfg.train, {}, opts.jobs);
    write_file(fs::path(opts.out_dir) / (std::string(name) + "_loco.csv"), plain.to_csv());
    table << plain.to_table(std::string(name) + " (unmodified pathway)") << "\n";
    if (cfg.apply_interventions && !cfg.pathway.interventions.empty() &&
        spec.kind == ModelKind::kGat) {
      LocoReport edited =
          run_loco(samples, graph, spec, cfg.train, cfg.pathway.interventions, opts.jobs);
      write_file(fs::path(opts.out_dir) / (std::string(name) + "_loco_intervened.csv"),
                 edited.to_csv());
      table << edited.to_table(std::string(name) + " (edge intervention)") << "\n";
    }
  };
  if (cfg.model_kind == "mlp" || cfg.model_kind == "both") run_kind("mlp", mlp_spec);
  if (cfg.model_kind == "gat" || cfg.model_kind == "both") run_kind("gat", gat_spec);

  write_file(fs::path(opts.out_dir) / "loco_tables.txt", table.str());
  stamp_run(opts.out_dir, cfg);
  std::cout << table.str();
  return kExitOk;
}

int cmd_discover(const ExperimentConfig& base, const CliOptions& opts) {
  const ExperimentConfig cfg = apply_cli(base, opts);
  fs::create_directories(opts.out_dir);
  const std::vector<Sample> samples = window_all(cfg.load_or_simulate_discovery());
  DiscoveryConfig dcfg = cfg.discovery;
  dcfg.gat.attention = AttentionActivation::kTanh;

  const SignedInteractionMatrix learned = discover(samples, cfg.pathway.genes, dcfg);
  const GroundTruthSigns truth = GroundTruthSigns::from_config(cfg.pathway);
  const SignReport report = compare_signs(learned, truth, cfg.discovery_threshold);

  write_file(fs::path(opts.out_dir) / "interaction_matrix.csv", learned.to_csv());
  write_file(fs::path(opts.out_dir) / "interaction_edges.csv", learned.to_edge_list_csv());
  write_file(fs::path(opts.out_dir) / "sign_report.txt", report.to_text());
  stamp_run(opts.out_dir, cfg);
  std::cout << report.to_text();
  return kExitOk;
}

int cmd_report(const std::string& run_dir, const std::string& out_path) {
  if (!fs::is_directory(run_dir)) throw DataError("not a run directory: " + run_dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(run_dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("run directory is empty: " + run_dir);

  std::ostringstream os;
  os << "# Run summary: " << fs::path(run_dir).filename().string() << "\n\n";
  for (const auto& f : files) {
    const std::string ext = f.extension().string();
    if (f.filename() == "run_info.txt" || ext == ".txt") {
      std::ifstream in(f);
      std::stringstream ss;
      ss << in.rdbuf();
      os << "## " << f.filename().string() << "\n\n```\n" << ss.str() << "```\n\n";
    } else {
      os << "- " << f.filename().string() << " (" << fs::file_size(f) << " bytes)\n";
    }
  }
  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write summary: " + out_path);
  out << os.str();
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

}  // namespace pathgat

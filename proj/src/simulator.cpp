#include "pathgat/simulator.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "pathgat/graph.hpp"

namespace pathgat {

std::string condition_name(Condition c) {
  switch (c) {
    case Condition::kWildType: return "WT";
    case Condition::kTp53Knockdown: return "TP53sh";
    case Condition::kNutlin: return "Nutlin";
  }
  throw std::logic_error("unreachable condition");
}

Condition condition_from_name(const std::string& name) {
  if (name == "WT") return Condition::kWildType;
  if (name == "TP53sh") return Condition::kTp53Knockdown;
  if (name == "Nutlin") return Condition::kNutlin;
  throw DataError("unknown condition label: " + name);
}

std::vector<double> SimConfig::default_sample_times() {
  std::vector<double> t;
  for (int i = 0; i < 9; ++i) t.push_back(24.0 * i / 8.0);
  return t;
}

void SimConfig::validate() const {
  if (sample_times.empty()) throw DataError("sim config: sample_times empty");
  for (std::size_t i = 1; i < sample_times.size(); ++i)
    if (sample_times[i] <= sample_times[i - 1])
      throw DataError("sim config: sample_times must be strictly increasing");
  if (sample_times.front() < 0.0 || sample_times.back() > duration_h)
    throw DataError("sim config: sample_times outside [0, duration]");
  if (rk4_step_h <= 0.0 || rk4_step_h > 0.01)
    throw DataError("sim config: rk4_step_h must be in (0, 0.01]");
  if (noise_sd < 0.0) throw DataError("sim config: noise_sd must be nonnegative");
}

namespace {

using State = std::array<double, 3>;

double hill_repression(double x, double threshold, double n) {
  return 1.0 / (1.0 + std::pow(x / threshold, n));
}

double hill_activation(double x, double threshold, double n) {
  const double h = std::pow(x / threshold, n);
  return h / (1.0 + h);
}

State derivative(const State& s, const OdeParams& p, Condition cond) {
  const auto [tp53, mdm2, mdm4] = s;
  const double kd = cond == Condition::kTp53Knockdown ? p.knockdown_factor : 1.0;
  // Nutlin blocks the MDM2 -| TP53 interaction: the repression term drops out.
  const double mdm2_rep = cond == Condition::kNutlin
                              ? 1.0
                              : hill_repression(mdm2, p.mdm2_repression_threshold,
                                                p.mdm2_repression_hill);
  const double mdm4_rep =
      hill_repression(mdm4, p.mdm4_repression_threshold, p.mdm4_repression_hill);
  State d;
  d[0] = kd * (p.tp53_production_mdm2_gated * mdm2_rep +
               p.tp53_production_mdm4_gated * mdm4_rep) -
         p.tp53_degradation * tp53;
  d[1] = p.mdm2_production * hill_activation(tp53, p.mdm2_activation_threshold,
                                             p.mdm2_activation_hill) -
         p.mdm2_degradation * mdm2;
  d[2] = p.mdm4_production * hill_activation(tp53, p.mdm4_activation_threshold,
                                             p.mdm4_activation_hill) -
         p.mdm4_degradation * mdm4 - p.mdm2_mediated_mdm4_degradation * mdm2 * mdm4;
  return d;
}

State rk4_step(const State& s, double dt, const OdeParams& p, Condition cond) {
  auto axpy = [](const State& a, double c, const State& b) {
    return State{a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]};
  };
  const State k1 = derivative(s, p, cond);
  const State k2 = derivative(axpy(s, dt / 2, k1), p, cond);
  const State k3 = derivative(axpy(s, dt / 2, k2), p, cond);
  const State k4 = derivative(axpy(s, dt, k3), p, cond);
  State out;
  for (int i = 0; i < 3; ++i)
    out[i] = s[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

void check_state(const State& s, double t) {
  for (double v : s) {
    if (!std::isfinite(v))
      throw DivergenceError("simulation diverged at t=" + std::to_string(t) + " h");
    if (v <= 0.0)
      throw DivergenceError("simulated concentration became non-positive at t=" +
                            std::to_string(t) + " h");
  }
}

}  // namespace

Trajectory simulate(const SimConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  State s = cfg.params.initial;
  if (cfg.init_jitter_sd > 0.0)
    for (auto& v : s) v *= std::exp(cfg.init_jitter_sd * gauss(rng));

  Trajectory traj;
  traj.condition = cfg.condition;
  traj.times_h = cfg.sample_times;

  double t = 0.0;
  for (double target : cfg.sample_times) {
    while (t < target - 1e-12) {
      const double dt = std::min(cfg.rk4_step_h, target - t);
      s = rk4_step(s, dt, cfg.params, cfg.condition);
      t += dt;
      check_state(s, t);
    }
    State observed = s;
    if (cfg.noise_sd > 0.0)
      for (auto& v : observed) v *= std::exp(cfg.noise_sd * gauss(rng));
    traj.values.push_back(observed);
  }
  return traj;
}

std::vector<Trajectory> generate_dataset(const SimConfig& base, int replicates) {
  std::vector<Trajectory> out;
  const Condition conds[] = {Condition::kWildType, Condition::kTp53Knockdown,
                             Condition::kNutlin};
  for (Condition c : conds)
    for (int r = 0; r < replicates; ++r) {
      SimConfig cfg = base;
      cfg.condition = c;
      // distinct deterministic stream per (condition, replicate)
      cfg.seed = base.seed * 1000003 + static_cast<uint64_t>(c) * 131 + static_cast<uint64_t>(r);
      Trajectory t = simulate(cfg);
      t.replicate_id = r;
      out.push_back(std::move(t));
    }
  return out;
}

namespace {
using json = nlohmann::ordered_json;
}

std::string SimConfig::to_json() const {
  json p{{"tp53_production_mdm2_gated", params.tp53_production_mdm2_gated},
         {"tp53_production_mdm4_gated", params.tp53_production_mdm4_gated},
         {"tp53_degradation", params.tp53_degradation},
         {"mdm2_production", params.mdm2_production},
         {"mdm2_degradation", params.mdm2_degradation},
         {"mdm4_production", params.mdm4_production},
         {"mdm4_degradation", params.mdm4_degradation},
         {"mdm2_mediated_mdm4_degradation", params.mdm2_mediated_mdm4_degradation},
         {"mdm2_repression_threshold", params.mdm2_repression_threshold},
         {"mdm2_repression_hill", params.mdm2_repression_hill},
         {"mdm4_repression_threshold", params.mdm4_repression_threshold},
         {"mdm4_repression_hill", params.mdm4_repression_hill},
         {"mdm2_activation_threshold", params.mdm2_activation_threshold},
         {"mdm2_activation_hill", params.mdm2_activation_hill},
         {"mdm4_activation_threshold", params.mdm4_activation_threshold},
         {"mdm4_activation_hill", params.mdm4_activation_hill},
         {"knockdown_factor", params.knockdown_factor},
         {"initial", params.initial}};
  json j{{"params", p},
         {"condition", condition_name(condition)},
         {"duration_h", duration_h},
         {"sample_times", sample_times},
         {"rk4_step_h", rk4_step_h},
         {"noise_sd", noise_sd},
         {"init_jitter_sd", init_jitter_sd},
         {"seed", seed}};
  return j.dump(2) + "\n";
}

SimConfig SimConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("sim config parse error: ") + e.what());
  }
  SimConfig cfg;
  cfg.sample_times = default_sample_times();
  if (j.contains("params")) {
    const auto& p = j["params"];
    auto get = [&](const char* key, double& field) {
      if (p.contains(key)) field = p[key].get<double>();
    };
    get("tp53_production_mdm2_gated", cfg.params.tp53_production_mdm2_gated);
    get("tp53_production_mdm4_gated", cfg.params.tp53_production_mdm4_gated);
    get("tp53_degradation", cfg.params.tp53_degradation);
    get("mdm2_production", cfg.params.mdm2_production);
    get("mdm2_degradation", cfg.params.mdm2_degradation);
    get("mdm4_production", cfg.params.mdm4_production);
    get("mdm4_degradation", cfg.params.mdm4_degradation);
    get("mdm2_mediated_mdm4_degradation", cfg.params.mdm2_mediated_mdm4_degradation);
    get("mdm2_repression_threshold", cfg.params.mdm2_repression_threshold);
    get("mdm2_repression_hill", cfg.params.mdm2_repression_hill);
    get("mdm4_repression_threshold", cfg.params.mdm4_repression_threshold);
    get("mdm4_repression_hill", cfg.params.mdm4_repression_hill);
    get("mdm2_activation_threshold", cfg.params.mdm2_activation_threshold);
    get("mdm2_activation_hill", cfg.params.mdm2_activation_hill);
    get("mdm4_activation_threshold", cfg.params.mdm4_activation_threshold);
    get("mdm4_activation_hill", cfg.params.mdm4_activation_hill);
    get("knockdown_factor", cfg.params.knockdown_factor);
    if (p.contains("initial")) cfg.params.initial = p["initial"].get<std::array<double, 3>>();
  }
  if (j.contains("condition")) cfg.condition = condition_from_name(j["condition"].get<std::string>());
  if (j.contains("duration_h")) cfg.duration_h = j["duration_h"].get<double>();
  if (j.contains("sample_times")) cfg.sample_times = j["sample_times"].get<std::vector<double>>();
  if (j.contains("rk4_step_h")) cfg.rk4_step_h = j["rk4_step_h"].get<double>();
  if (j.contains("noise_sd")) cfg.noise_sd = j["noise_sd"].get<double>();
  if (j.contains("init_jitter_sd")) cfg.init_jitter_sd = j["init_jitter_sd"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
  return cfg;
}

SimConfig SimConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open sim config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace pathgat

#include "pathgat/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pathgat/graph.hpp"

namespace pathgat {

Standardizer Standardizer::fit(const std::vector<Sample>& samples) {
  if (samples.empty()) throw DataError("standardizer: empty sample set");
  Standardizer st;
  std::array<double, kNumGenes> sum{}, sumsq{};
  std::size_t count = 0;
  for (const auto& s : samples) {
    for (int g = 0; g < kNumGenes; ++g) {
      for (int k = 0; k < kWindowLen; ++k) {
        sum[g] += s.node_features[g][k];
        sumsq[g] += s.node_features[g][k] * s.node_features[g][k];
      }
      sum[g] += s.target[g];
      sumsq[g] += s.target[g] * s.target[g];
    }
    count += kWindowLen + 1;
  }
  for (int g = 0; g < kNumGenes; ++g) {
    st.mean[g] = sum[g] / count;
    const double var = std::max(0.0, sumsq[g] / count - st.mean[g] * st.mean[g]);
    st.sd[g] = std::sqrt(var);
    if (st.sd[g] < 1e-8) {
      std::cerr << "warning: gene " << g << " has degenerate variance, using sd=1\n";
      st.sd[g] = 1.0;
    }
  }
  return st;
}

Sample Standardizer::transform(const Sample& s) const {
  Sample out = s;
  for (int g = 0; g < kNumGenes; ++g) {
    for (int k = 0; k < kWindowLen; ++k) out.node_features[g][k] = apply(g, s.node_features[g][k]);
    out.target[g] = apply(g, s.target[g]);
  }
  return out;
}

std::vector<Sample> LocoFold::standardized_train() const {
  std::vector<Sample> out;
  out.reserve(train.size());
  for (const auto& s : train) out.push_back(standardizer.transform(s));
  return out;
}

std::vector<Sample> LocoFold::standardized_test() const {
  std::vector<Sample> out;
  out.reserve(test.size());
  for (const auto& s : test) out.push_back(standardizer.transform(s));
  return out;
}

std::vector<Sample> window_samples(const Trajectory& t, int trajectory_id,
                                   bool include_target_gap) {
  if (t.num_points() < kWindowLen + 1)
    throw DataError("windowing needs at least 4 time points, got " +
                    std::to_string(t.num_points()));
  std::vector<Sample> out;
  for (std::size_t s = 0; s + kWindowLen < t.num_points(); ++s) {
    Sample sample;
    sample.condition = t.condition;
    sample.trajectory_id = trajectory_id;
    sample.window_start = static_cast<int>(s);
    std::array<double, kWindowLen> gaps;
    gaps[0] = t.times_h[s + 1] - t.times_h[s];
    gaps[1] = t.times_h[s + 2] - t.times_h[s + 1];
    gaps[2] = include_target_gap ? t.times_h[s + 3] - t.times_h[s + 2] : gaps[1];
    for (int g = 0; g < kNumGenes; ++g) {
      auto& f = sample.node_features[g];
      for (int k = 0; k < kWindowLen; ++k) f[k] = t.values[s + k][g];
      for (int k = 0; k < kWindowLen; ++k) f[kWindowLen + k] = gaps[k];
      for (int k = 0; k < kNumConditions; ++k)
        f[2 * kWindowLen + k] = static_cast<int>(t.condition) == k ? 1.0 : 0.0;
      sample.target[g] = t.values[s + kWindowLen][g];
    }
    out.push_back(sample);
  }
  return out;
}

std::vector<Sample> window_all(const std::vector<Trajectory>& trajs, bool include_target_gap) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    auto s = window_samples(trajs[i], static_cast<int>(i), include_target_gap);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

std::vector<LocoFold> loco_folds(const std::vector<Sample>& samples) {
  std::vector<LocoFold> folds;
  for (int k = 0; k < kNumConditions; ++k) {
    LocoFold fold;
    fold.held_out = static_cast<Condition>(k);
    for (const auto& s : samples)
      (s.condition == fold.held_out ? fold.test : fold.train).push_back(s);
    if (fold.test.empty())
      throw DataError("LOCO: no samples for condition " + condition_name(fold.held_out));
    if (fold.train.empty())
      throw DataError("LOCO: no training samples when holding out " +
                      condition_name(fold.held_out));
    fold.standardizer = Standardizer::fit(fold.train);
    folds.push_back(std::move(fold));
  }
  return folds;
}

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string trajectories_to_csv(const std::vector<Trajectory>& trajs) {
  std::ostringstream os;
  os << "condition,replicate,time_h,TP53,MDM2,MDM4\n";
  for (const auto& t : trajs)
    for (std::size_t i = 0; i < t.num_points(); ++i) {
      os << condition_name(t.condition) << ',' << t.replicate_id << ','
         << format_value(t.times_h[i]);
      for (int g = 0; g < kNumGenes; ++g) os << ',' << format_value(t.values[i][g]);
      os << '\n';
    }
  return os.str();
}

std::vector<Trajectory> trajectories_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw DataError("trajectory CSV: empty file");
  // tolerate a trailing \r from windows line endings
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string expected = "condition,replicate,time_h,TP53,MDM2,MDM4";
  if (line != expected)
    throw DataError("trajectory CSV: expected header '" + expected + "', found '" + line + "'");

  std::vector<Trajectory> out;
  auto find_traj = [&](Condition c, int rep) -> Trajectory& {
    for (auto& t : out)
      if (t.condition == c && t.replicate_id == rep) return t;
    out.push_back(Trajectory{c, rep, {}, {}});
    return out.back();
  };

  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 6)
      throw DataError("trajectory CSV line " + std::to_string(lineno) + ": expected 6 fields, got " +
                      std::to_string(fields.size()));
    try {
      const Condition c = condition_from_name(fields[0]);
      const int rep = std::stoi(fields[1]);
      const double time = std::stod(fields[2]);
      Trajectory& t = find_traj(c, rep);
      if (!t.times_h.empty() && time <= t.times_h.back())
        throw DataError("trajectory CSV line " + std::to_string(lineno) +
                        ": time not strictly increasing");
      t.times_h.push_back(time);
      t.values.push_back({std::stod(fields[3]), std::stod(fields[4]), std::stod(fields[5])});
    } catch (const std::invalid_argument&) {
      throw DataError("trajectory CSV line " + std::to_string(lineno) + ": malformed number");
    }
  }
  if (out.empty()) throw DataError("trajectory CSV: no data rows");
  return out;
}

std::vector<Trajectory> read_trajectories(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trajectory CSV: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return trajectories_from_csv(ss.str());
}

void write_trajectories(const std::string& path, const std::vector<Trajectory>& trajs) {
  std::ofstream outf(path);
  if (!outf) throw DataError("cannot write trajectory CSV: " + path);
  outf << trajectories_to_csv(trajs);
}

}  // namespace pathgat

#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathgat {

/// Thrown when numerical integration or training leaves the finite range.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Condition { kWildType, kTp53Knockdown, kNutlin };

std::string condition_name(Condition c);
Condition condition_from_name(const std::string& name);

/// Rate constants for the TP53-MDM2-MDM4 negative feedback loop.
/// TP53 drives MDM2 and MDM4 production through Hill activation. TP53
/// production runs through two parallel channels, one gated by MDM2
/// repression and one by MDM4 repression, so each repressor acts through
/// its own Hill term and stays identifiable when the other saturates.
/// MDM2 additionally degrades MDM4. Units: rates in 1/h, thresholds in
/// expression units.
struct OdeParams {
  double tp53_production_mdm2_gated = 2.523;  // channel repressed by MDM2
  double tp53_production_mdm4_gated = 2.267;  // channel repressed by MDM4
  double tp53_degradation = 0.329;
  double mdm2_production = 5.737;
  double mdm2_degradation = 0.469;
  double mdm4_production = 5.645;
  double mdm4_degradation = 0.305;
  double mdm2_mediated_mdm4_degradation = 0.282;

  double mdm2_repression_threshold = 2.267;  // MDM2 -| TP53
  double mdm2_repression_hill = 4.0;
  double mdm4_repression_threshold = 1.69;   // MDM4 -| TP53
  double mdm4_repression_hill = 4.0;
  double mdm2_activation_threshold = 6.672;  // TP53 -> MDM2
  double mdm2_activation_hill = 4.0;
  double mdm4_activation_threshold = 5.965;  // TP53 -> MDM4
  double mdm4_activation_hill = 6.0;

  double knockdown_factor = 0.2;  // TP53-sh production multiplier
  std::array<double, 3> initial = {2.362, 0.791, 0.842};  // TP53, MDM2, MDM4
};

struct SimConfig {
  /// 9 evenly spaced samples over 0-24 h.
  static std::vector<double> default_sample_times();

  OdeParams params;
  Condition condition = Condition::kWildType;
  double duration_h = 24.0;
  // strictly increasing, within [0, duration]
  std::vector<double> sample_times = default_sample_times();
  double rk4_step_h = 0.005;
  double noise_sd = 0.05;           // multiplicative log-normal observation noise
  double init_jitter_sd = 0.1;      // log-normal jitter on initial conditions
  uint64_t seed = 0;

  void validate() const;

  std::string to_json() const;
  static SimConfig from_json(const std::string& text);
  static SimConfig load(const std::string& path);
};

/// One condition-tagged time series: values[t][g] in expression units.
struct Trajectory {
  Condition condition = Condition::kWildType;
  int replicate_id = 0;
  std::vector<double> times_h;
  std::vector<std::array<double, 3>> values;  // TP53, MDM2, MDM4 per time point

  std::size_t num_points() const { return times_h.size(); }
};

/// Integrates the feedback-loop ODE with fixed-step RK4 and samples at
/// cfg.sample_times, applying observation noise when noise_sd > 0.
Trajectory simulate(const SimConfig& cfg);

/// All conditions x `replicates` trajectories. Replicates differ only via
/// the noise seed and jittered initial conditions.
std::vector<Trajectory> generate_dataset(const SimConfig& base, int replicates = 2);

}  // namespace pathgat

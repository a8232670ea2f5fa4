#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pathgat/experiment.hpp"

using namespace pathgat;

int main(int argc, char** argv) {
  CLI::App app{"pathgat: pathway-structured graph attention for gene expression forecasting"};
  app.require_subcommand(1);

  std::string config_path;
  if (const char* env = std::getenv("PATHGAT_CONFIG")) config_path = env;

  CliOptions opts;
  std::string run_dir, report_out = "summary.md";

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) sub->add_option("--config", config_path, "experiment config (json)");
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--seeds", [&opts](const std::vector<std::string>& v) {
      opts.seeds = std::stoi(v.at(0));
      return true;
    }, "number of seeds (overrides config)");
    sub->add_option("--jobs", opts.jobs, "parallel worker threads");
  };

  auto* sim = app.add_subcommand("simulate", "generate synthetic trajectory CSVs");
  add_common(sim, true);
  auto* train = app.add_subcommand("train", "train on all data, write checkpoint + loss curve");
  add_common(train, true);
  auto* loco = app.add_subcommand("loco", "leave-one-condition-out experiment");
  add_common(loco, true);
  loco->add_option("--intervene", opts.intervene,
                   "test-time edge edit, relation:src:dst:remove|add[:condition]");
  auto* disc = app.add_subcommand("discover", "no-prior interaction discovery");
  add_common(disc, true);
  disc->add_option("--threshold", [&opts](const std::vector<std::string>& v) {
    opts.threshold = std::stod(v.at(0));
    return true;
  }, "edge-present threshold");
  auto* rep = app.add_subcommand("report", "consolidate a run directory into a summary");
  rep->add_option("run_dir", run_dir, "completed run directory")->required();
  rep->add_option("--out", report_out, "summary output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (rep->parsed()) return cmd_report(run_dir, report_out);
    ExperimentConfig cfg =
        config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(config_path);
    if (sim->parsed()) return cmd_simulate(cfg, opts);
    if (train->parsed()) return cmd_train(cfg, opts);
    if (loco->parsed()) return cmd_loco(cfg, opts);
    if (disc->parsed()) return cmd_discover(cfg, opts);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

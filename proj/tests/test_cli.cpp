#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_binary;
fs::path g_work;

int run(const std::string& args) {
  const std::string cmd = g_binary + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return status < 0 ? status : WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

const char* kTinyConfig = R"({
  "model_kind": "mlp",
  "sim_replicates": 1,
  "train": {"epochs": 30, "patience": 0, "validation_fraction": 0.0, "seeds": [0]},
  "gat": {"heads": 2, "head_dim": 2},
  "discovery": {"train": {"epochs": 15, "patience": 0, "validation_fraction": 0.0}, "seeds": [0]}
})";

}  // namespace

TEST_CASE("usage errors exit with code 1") {
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("loco --no-such-flag") == 1);
}

TEST_CASE("missing inputs exit with code 2") {
  CHECK(run("simulate --config /nonexistent/config.json --out " + (g_work / "x").string()) == 2);
  CHECK(run("report /nonexistent/rundir") == 2);
  const fs::path cfg = g_work / "tiny.json";
  write(cfg, kTinyConfig);
  CHECK(run("loco --config " + cfg.string() + " --intervene bogus --out " +
            (g_work / "x").string()) == 2);
}

TEST_CASE("simulate writes per-trajectory and pooled csvs, byte-stable") {
  const fs::path cfg = g_work / "tiny.json";
  write(cfg, kTinyConfig);
  const fs::path out1 = g_work / "sim1", out2 = g_work / "sim2";
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + out1.string()) == 0);
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + out2.string()) == 0);

  CHECK(fs::exists(out1 / "all_trajectories.csv"));
  CHECK(fs::exists(out1 / "traj_WT_0.csv"));
  CHECK(fs::exists(out1 / "traj_TP53sh_0.csv"));
  CHECK(fs::exists(out1 / "traj_Nutlin_0.csv"));
  CHECK(fs::exists(out1 / "resolved_config.json"));
  CHECK(fs::exists(out1 / "run_info.txt"));
  const std::string all = slurp(out1 / "all_trajectories.csv");
  CHECK(all.rfind("condition,replicate,time_h,TP53,MDM2,MDM4\n", 0) == 0);
  // rerun is byte-identical
  CHECK(all == slurp(out2 / "all_trajectories.csv"));
  CHECK(slurp(out1 / "run_info.txt") == slurp(out2 / "run_info.txt"));
}

TEST_CASE("train writes checkpoint and loss curve") {
  const fs::path cfg = g_work / "tiny.json";
  write(cfg, kTinyConfig);
  const fs::path out = g_work / "train";
  REQUIRE(run("train --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "mlp_checkpoint.json"));
  const std::string curve = slurp(out / "mlp_loss_curve.csv");
  CHECK(curve.rfind("epoch,train_mse\n", 0) == 0);
  // 30 epochs -> 30 data lines plus header
  CHECK(std::count(curve.begin(), curve.end(), '\n') == 31);
}

TEST_CASE("loco writes a fold x seed table and is byte-stable across reruns") {
  const fs::path cfg = g_work / "tiny.json";
  write(cfg, kTinyConfig);
  const fs::path out1 = g_work / "loco1", out2 = g_work / "loco2";
  REQUIRE(run("loco --config " + cfg.string() + " --out " + out1.string()) == 0);
  REQUIRE(run("loco --config " + cfg.string() + " --out " + out2.string()) == 0);

  const std::string csv = slurp(out1 / "mlp_loco.csv");
  CHECK(csv.rfind("fold,seed,test_mse\n", 0) == 0);
  for (const char* fold : {"WT,0,", "TP53sh,0,", "Nutlin,0,"})
    CHECK(csv.find(fold) != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // 3 folds x 1 seed
  CHECK(csv == slurp(out2 / "mlp_loco.csv"));
  CHECK(slurp(out1 / "loco_tables.txt") == slurp(out2 / "loco_tables.txt"));

  // --seeds expands the grid
  const fs::path out3 = g_work / "loco3";
  REQUIRE(run("loco --config " + cfg.string() + " --seeds 2 --out " + out3.string()) == 0);
  const std::string csv3 = slurp(out3 / "mlp_loco.csv");
  CHECK(std::count(csv3.begin(), csv3.end(), '\n') == 7);  // 3 folds x 2 seeds
  CHECK(slurp(out3 / "run_info.txt").find("seeds=0,1") != std::string::npos);
}

TEST_CASE("discover writes the interaction matrix and sign report") {
  const fs::path cfg = g_work / "tiny.json";
  write(cfg, kTinyConfig);
  const fs::path out1 = g_work / "disc1", out2 = g_work / "disc2";
  REQUIRE(run("discover --config " + cfg.string() + " --out " + out1.string()) == 0);
  REQUIRE(run("discover --config " + cfg.string() + " --threshold 0.2 --out " +
              out2.string()) == 0);

  const std::string mat = slurp(out1 / "interaction_matrix.csv");
  CHECK(mat.rfind("target_gene,from_TP53,from_MDM2,from_MDM4\n", 0) == 0);
  CHECK(fs::exists(out1 / "interaction_edges.csv"));
  const std::string rep = slurp(out1 / "sign_report.txt");
  CHECK(rep.find("/5 true edges correct") != std::string::npos);
  // the threshold flag only affects the verdicts, not the learned scores
  CHECK(mat == slurp(out2 / "interaction_matrix.csv"));
}

TEST_CASE("report summarizes a run directory") {
  const fs::path cfg = g_work / "tiny.json";
  write(cfg, kTinyConfig);
  const fs::path out = g_work / "forreport";
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + out.string()) == 0);
  const fs::path summary = g_work / "summary.md";
  REQUIRE(run("report " + out.string() + " --out " + summary.string()) == 0);
  const std::string text = slurp(summary);
  CHECK(text.find("run_info.txt") != std::string::npos);
  CHECK(text.find("all_trajectories.csv") != std::string::npos);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-pathgat-binary>\n");
    return 1;
  }
  g_binary = argv[1];
  g_work = fs::temp_directory_path() / "pathgat_cli_test";
  fs::remove_all(g_work);
  fs::create_directories(g_work);
  doctest::Context ctx;
  ctx.applyCommandLine(1, argv);
  const int rc = ctx.run();
  fs::remove_all(g_work);
  return rc;
}

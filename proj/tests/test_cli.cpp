#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"
#include "qntk/csv.hpp"
#include "qntk/dataset.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string bin() {
  const char* b = std::getenv("QNTK_LAB_BIN");
  return b ? b : "qntk-lab";
}

std::string config(const std::string& name) {
  const char* d = std::getenv("QNTK_CONFIG_DIR");
  return (fs::path(d ? d : "configs") / name).string();
}

std::string out_dir(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / "qntk_cli" / name;
  fs::remove_all(p);
  return p.string();
}

int run(const std::string& args) {
  const std::string cmd = bin() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& dir, const std::string& name) { return qntk::read_file((fs::path(dir) / name).string()); }

json load_json(const std::string& dir, const std::string& name) { return json::parse(slurp(dir, name)); }

std::vector<std::vector<std::string>> rows(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    out.emplace_back();
    for (auto f : qntk::split_fields(line)) out.back().emplace_back(f);
  }
  return out;
}

}  // namespace

TEST(Cli, HelpAndMissingSubcommand) {
  EXPECT_EQ(run("--help"), 0);
  const std::string o = out_dir("nosub");
  EXPECT_EQ(run("--out " + o), 2);
  EXPECT_EQ(load_json(o, "error.json")["error"], "usage");
}

TEST(Cli, SingleQubitOptimizeExample) {
  const std::string o = out_dir("opt");
  ASSERT_EQ(run("optimize --qubits 1 --ansatz ry --obs Z --target -1 --eta 0.05 --steps 200 --out " + o), 0);
  const auto r = rows(slurp(o, "trace.csv"));
  ASSERT_EQ(r.size(), 202u);
  EXPECT_EQ(r[0], (std::vector<std::string>{"t", "loss", "eps_0", "theta_0", "theta_1", "theta_2"}));
  for (std::size_t t = 2; t < r.size(); ++t) EXPECT_LE(std::stod(r[t][1]), std::stod(r[t - 1][1]));
  // The target sits at a degenerate minimum where the kernel vanishes:
  // eps(t) -> 1 / (8 reps eta t), so 200 steps stop near 4e-3.
  const double eps = std::abs(std::stod(r.back()[2]));
  EXPECT_NEAR(eps, 1.0 / (8 * 3 * 0.05 * 200), 0.05 * eps);
}

TEST(Cli, KernelReplicaHasTwelveNonzeroEigenvalues) {
  const std::string o = out_dir("kernel");
  ASSERT_EQ(run("kernel --config " + config("replica.toml") + " --out " + o), 0);
  const auto r = rows(slurp(o, "spectrum.csv"));
  ASSERT_EQ(r.size(), 21u);
  const double lmax = std::stod(r[1][1]);
  int above = 0;
  for (std::size_t i = 1; i < r.size(); ++i) above += std::stod(r[i][1]) > 1e-9 * lmax;
  EXPECT_EQ(above, 12);
  EXPECT_EQ(load_json(o, "manifest.json")["summary"]["rank"], 12);
}

TEST(Cli, FlagsOverrideConfigAndManifestIsComplete) {
  const std::string o = out_dir("override");
  ASSERT_EQ(run("learn --config " + config("replica.toml") + " --steps 5 --out " + o), 0);
  EXPECT_EQ(rows(slurp(o, "trace.csv")).size(), 7u);
  const json m = load_json(o, "manifest.json");
  EXPECT_EQ(m["config"]["descent"]["steps"], 5);
  EXPECT_EQ(m["config"]["descent"]["eta"], 0.02);
  EXPECT_EQ(m["config"]["descent"]["grad_tol"], 1e-8);
  EXPECT_EQ(m["config"]["descent"]["early_stop"], false);
  EXPECT_EQ(m["config"]["reference"]["theta_star"], "zeros");
  EXPECT_EQ(m["config"]["circuit"]["observables"], json::array({"ZZZ"}));
  EXPECT_EQ(m["config"]["seed"], 0);
  for (const auto& name : m["outputs"]) EXPECT_TRUE(fs::exists(fs::path(o) / name.get<std::string>())) << name;
}

TEST(Cli, IdenticalRunsGiveIdenticalCsv) {
  const std::string a = out_dir("det_a"), b = out_dir("det_b");
  const std::string args = "learn --config " + config("replica.toml") + " --steps 40 --seed 7 --out ";
  ASSERT_EQ(run(args + a), 0);
  ASSERT_EQ(run(args + b), 0);
  EXPECT_EQ(slurp(a, "trace.csv"), slurp(b, "trace.csv"));
  EXPECT_EQ(slurp(a, "spectrum.csv"), slurp(b, "spectrum.csv"));
  const std::string c = out_dir("det_c");
  ASSERT_EQ(run("learn --config " + config("replica.toml") + " --steps 40 --seed 8 --out " + c), 0);
  EXPECT_NE(slurp(a, "trace.csv"), slurp(c, "trace.csv"));
}

TEST(Cli, HybridScanIsDeterministic) {
  const std::string a = out_dir("scan_a"), b = out_dir("scan_b");
  const std::string args = "hybrid-scan --widths 2,8 --samples 1000 --qubits 3 --depth 3 --out-dim 8 --plots --out ";
  ASSERT_EQ(run(args + a), 0);
  ASSERT_EQ(run(args + b), 0);
  EXPECT_EQ(slurp(a, "scan.csv"), slurp(b, "scan.csv"));
  EXPECT_EQ(rows(slurp(a, "scan.csv"))[0], (std::vector<std::string>{"width", "e_conn", "se", "e2_norm", "n_samples"}));
  EXPECT_EQ(slurp(a, "scan.svg").rfind("<svg", 0), 0u);
  EXPECT_TRUE(load_json(a, "manifest.json")["summary"].contains("slope"));
}

TEST(Cli, DatasetGenRoundTrips) {
  const std::string a = out_dir("gen_a"), b = out_dir("gen_b");
  ASSERT_EQ(run("dataset-gen --qubits 3 --n-train 40 --n-test 10 --gap 0.3 --out " + a), 0);
  ASSERT_EQ(run("dataset-gen --qubits 3 --n-train 40 --n-test 10 --gap 0.3 --out " + b), 0);
  EXPECT_EQ(slurp(a, "dataset.csv"), slurp(b, "dataset.csv"));
  const auto d = qntk::load_dataset((fs::path(a) / "dataset.csv").string());
  EXPECT_EQ(d.n_train, 40u);
  EXPECT_EQ(d.samples.size(), 50u);

  const std::string l = out_dir("gen_learn");
  ASSERT_EQ(run("learn --qubits 3 --steps 3 --dataset " + (fs::path(a) / "dataset.csv").string() + " --out " + l), 0);
  EXPECT_EQ(rows(slurp(l, "trace.csv"))[0].size(), 2u + 40u + 12u);
}

TEST(Cli, ThetaStarPolicies) {
  const std::string z = out_dir("star_zero");
  ASSERT_EQ(run("optimize --qubits 2 --reps 1 --steps 2 --out " + z), 0);
  for (const auto& v : load_json(z, "manifest.json")["summary"]["theta_star"]) EXPECT_EQ(v, 0.0);

  const std::string e = out_dir("star_explicit");
  EXPECT_EQ(run("optimize --qubits 2 --reps 1 --theta-star explicit --theta-star-values 1,2 --out " + e), 2);
  EXPECT_EQ(load_json(e, "error.json")["error"], "invalid-config");
  const std::string ok = out_dir("star_explicit_ok");
  ASSERT_EQ(run("optimize --qubits 2 --reps 1 --steps 2 --theta-star explicit --theta-star-values 1,2,3,4 --out " + ok), 0);
  EXPECT_EQ(load_json(ok, "manifest.json")["summary"]["theta_star"], json::array({1.0, 2.0, 3.0, 4.0}));

  // Two-phase run on the replica: 500 coarse steps, then the frozen prediction over 100 more.
  const std::string p = out_dir("star_pretrain");
  ASSERT_EQ(run("predict --config " + config("replica.toml") +
                " --theta-star pretrain --pretrain-steps 500 --pretrain-eta 0.02 --delta 0.01 --eta 100 --steps 100 --out " + p),
            0);
  const json s = load_json(p, "manifest.json")["summary"];
  EXPECT_EQ(s["pretrain_steps_run"], 500);
  EXPECT_EQ(s["steps_run"], 100);
  EXPECT_LT(s["frozen_max_rel_error"].get<double>(), 0.05);
  const auto r = rows(slurp(p, "prediction.csv"));
  EXPECT_EQ(r[0][1], "eps_0");
  EXPECT_EQ(r[0][21], "pred_frozen_eps_0");
  EXPECT_EQ(r[0][41], "pred_dqntk_eps_0");
}

TEST(Cli, ErrorRecordsAndExitCodes) {
  const std::string bad = out_dir("bad_key");
  fs::create_directories(bad);
  std::ofstream(fs::path(bad) / "c.toml") << "[descent]\nlearning_speed = 3\n";
  EXPECT_EQ(run("learn --config " + (fs::path(bad) / "c.toml").string() + " --out " + bad), 2);
  EXPECT_NE(load_json(bad, "error.json")["message"].get<std::string>().find("learning_speed"), std::string::npos);

  const std::string div = out_dir("diverge");
  EXPECT_EQ(run("optimize --qubits 1 --ansatz ry --obs Z --eta 50 --divergence-factor 1.0001 --out " + div), 3);
  const json e = load_json(div, "error.json");
  EXPECT_EQ(e["error"], "divergence");
  EXPECT_EQ(e["exit_code"], 3);
  EXPECT_TRUE(e.contains("step"));

  const std::string parse = out_dir("parse");
  fs::create_directories(parse);
  std::ofstream(fs::path(parse) / "d.csv") << "# adhoc d=3 delta=0.1 seed=1 v_seed=2 n_train=1\nx0,x1,x2,y\n0.1,0.2\n";
  EXPECT_EQ(run("learn --qubits 3 --dataset " + (fs::path(parse) / "d.csv").string() + " --out " + parse), 2);
  EXPECT_EQ(load_json(parse, "error.json")["line"], 3);

  const std::string dim = out_dir("dim");
  EXPECT_EQ(run("optimize --qubits 2 --obs ZZZ --out " + dim), 2);
  EXPECT_EQ(run("optimize --ansatz bogus --out " + dim), 2);
}

TEST(Cli, PlotsAreWritten) {
  const std::string o = out_dir("plots");
  ASSERT_EQ(run("learn --config " + config("replica.toml") + " --steps 20 --plots --out " + o), 0);
  for (const char* f : {"loss.svg", "spectrum.svg"}) EXPECT_EQ(slurp(o, f).rfind("<svg", 0), 0u) << f;
}

#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "support/fixtures.hpp"

using gaitmind::testing::slurp;
using gaitmind::testing::spit;
using gaitmind::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = gaitmind::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> gen_args(const fs::path& out) {
  return {"gen-synth", "--subjects", "2", "--trials", "3", "--fs", "50", "--time-scale", "0.3",
          "--seed", "4", "--out", out.string()};
}

/// Tiny dataset plus a config that trains in well under a second.
fs::path setup(const TempDir& dir, const std::string& protocol = "ind") {
  const auto data = dir / "data";
  EXPECT_EQ(run(gen_args(data)).code, 0);
  const auto cfg = dir / "cfg.json";
  spit(cfg, R"({"protocol": ")" + protocol + R"(", "sensor_config": "unilateral", "dataset_root": ")" +
                data.string() + R"(", "output_dir": ")" + (dir / "run").string() +
                R"(", "epochs": 1, "batch_size": 32, "window_ms": 320, "stride_ms": 100,
                 "excluded_subjects": [], "model": {"block_channels": [4], "hidden_width": 8}})");
  return cfg;
}

}  // namespace

TEST(Cli, ExitCodesByErrorKind) {
  using gaitmind::ErrorKind;
  EXPECT_EQ(gaitmind::cli::exit_code_for(ErrorKind::InvalidConfig), 2);
  EXPECT_EQ(gaitmind::cli::exit_code_for(ErrorKind::Parse), 3);
  EXPECT_EQ(gaitmind::cli::exit_code_for(ErrorKind::CorruptFile), 3);
  EXPECT_EQ(gaitmind::cli::exit_code_for(ErrorKind::InsufficientData), 3);
  EXPECT_EQ(gaitmind::cli::exit_code_for(ErrorKind::Io), 4);
  EXPECT_EQ(gaitmind::cli::exit_code_for(ErrorKind::InvalidState), 1);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"train"}).code, 2);
  EXPECT_EQ(run({"gen-synth", "--subjects", "0", "--out", "x"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, GenSynthIsByteIdenticalAndRefusesOverwrite) {
  TempDir dir("cli_gen");
  ASSERT_EQ(run(gen_args(dir / "a")).code, 0);
  ASSERT_EQ(run(gen_args(dir / "b")).code, 0);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    if (!e.is_regular_file() || e.path().filename() == "run.json") continue;
    const auto rel = fs::relative(e.path(), dir / "a");
    EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / rel.string())) << rel;
    ++files;
  }
  EXPECT_EQ(files, 7u);  // manifest + 6 trials

  const auto again = run(gen_args(dir / "a"));
  EXPECT_EQ(again.code, 2);
  EXPECT_NE(again.err.find("--force"), std::string::npos) << again.err;
  auto forced = gen_args(dir / "a");
  forced.push_back("--force");
  EXPECT_EQ(run(forced).code, 0);
}

TEST(Cli, ConfigProblems) {
  TempDir dir("cli_cfg");
  EXPECT_EQ(run({"train", "--config", (dir / "missing.json").string()}).code, 4);
  spit(dir / "bad.json", R"({"epochz": 3})");
  EXPECT_EQ(run({"train", "--config", (dir / "bad.json").string()}).code, 2);
  spit(dir / "nodata.json", R"({"dataset_root": ")" + (dir / "nothing").string() + R"("})");
  EXPECT_EQ(run({"train", "--config", (dir / "nodata.json").string()}).code, 4);
}

TEST(Cli, TrainTransferReportPipeline) {
  TempDir dir("cli_pipe");
  const auto cfg = setup(dir);
  const auto trained = run({"train", "--config", cfg.string(), "--out", (dir / "ind").string()});
  ASSERT_EQ(trained.code, 0) << trained.err;
  EXPECT_TRUE(fs::exists(dir / "ind" / "model_SYN01.gmwt"));
  EXPECT_TRUE(fs::exists(dir / "ind" / "report_SYN02_unilateral_thigh.json"));
  EXPECT_TRUE(fs::exists(dir / "ind" / "run.json"));

  const auto tl = run({"transfer", "--config", cfg.string(), "--pretrained", (dir / "ind").string(),
                       "--fraction", "10,20", "--out", (dir / "tl").string()});
  ASSERT_EQ(tl.code, 0) << tl.err;
  EXPECT_TRUE(fs::exists(dir / "tl" / "fraction_10"));
  EXPECT_TRUE(fs::exists(dir / "tl" / "fraction_20"));

  const auto md = run({"report", "--runs", (dir / "ind").string(), (dir / "tl").string(), "--format", "md",
                       "--out", (dir / "md").string(), "--plot"});
  ASSERT_EQ(md.code, 0) << md.err;
  const auto csv = run({"report", "--runs", (dir / "ind").string(), (dir / "tl").string(), "--format", "csv",
                        "--out", (dir / "csv").string()});
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_TRUE(fs::exists(dir / "md" / "fig_errors.svg"));
  EXPECT_TRUE(fs::exists(dir / "md" / "fig_transfer.svg"));
  EXPECT_FALSE(fs::exists(dir / "csv" / "fig_errors.svg"));

  // Both formats carry the same mean[std] strings.
  const std::string table = slurp(dir / "md" / "aggregate.md");
  const std::string rows = slurp(dir / "csv" / "aggregate.csv");
  std::istringstream lines(rows);
  std::string line;
  std::getline(lines, line);
  std::size_t checked = 0;
  while (std::getline(lines, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    ASSERT_GE(f.size(), 5u);
    if (f[3].empty()) continue;
    EXPECT_NE(table.find(f[3] + "[" + f[4] + "]"), std::string::npos) << line;
    ++checked;
  }
  EXPECT_GT(checked, 0u);

  const auto eval = run({"eval", "--config", cfg.string(), "--model", (dir / "ind" / "model_SYN01.gmwt").string(),
                         "--subject", "SYN01"});
  EXPECT_EQ(eval.code, 0) << eval.err;
}

TEST(Cli, DataErrors) {
  TempDir dir("cli_err");
  const auto cfg = setup(dir);
  const auto missing = run({"transfer", "--config", cfg.string(), "--pretrained", (dir / "none").string(),
                            "--fraction", "10"});
  EXPECT_EQ(missing.code, 3) << missing.err;
  EXPECT_EQ(run({"ablate", "--config", cfg.string(), "--configs", "elbow"}).code, 2);
  EXPECT_EQ(run({"transfer", "--config", cfg.string(), "--pretrained", (dir / "none").string(),
                 "--fraction", "12"}).code, 2);
  EXPECT_EQ(run({"report", "--runs", (dir / "data").string()}).code, 3);
  spit(dir / "data" / "SYN01" / "T01.csv", "t,a,mode\n0,1,ZZ\n");
  EXPECT_EQ(run({"train", "--config", cfg.string()}).code, 3);
}

TEST(Cli, AblateWritesPerSetupOutputs) {
  TempDir dir("cli_ablate");
  const auto cfg = setup(dir, "dep");
  const auto r = run({"ablate", "--config", cfg.string(), "--configs", "unilateral,bilateral"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "run" / "unilateral_thigh"));
  EXPECT_TRUE(fs::exists(dir / "run" / "bilateral_thigh"));
  EXPECT_TRUE(fs::exists(dir / "run" / "aggregate.md"));
  EXPECT_NE(r.out.find("12"), std::string::npos);
}

#include <gtest/gtest.h>

#include <array>
#include <cstdio>

#include "test_support.hpp"
#include "xwalk/config.hpp"
#include "xwalk/dataset.hpp"
#include "xwalk/error.hpp"
#include "xwalk/io.hpp"
#include "xwalk/metrics.hpp"
#include "xwalk/pipeline.hpp"

namespace xwalk {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

const fs::path kToyConfig = fs::path(XWALK_SOURCE_DIR) / "fixtures/toy/config.toml";

PipelineConfig toy_config(const fs::path& root) {
  auto c = load_config(kToyConfig);
  c.dataset_root = root;
  return c;
}

void run_acquisition(const PipelineConfig& c) {
  pipeline::fetch_crosswalks(c);
  pipeline::plan_routes(c);
  pipeline::gen_negatives(c);
  pipeline::fetch_images(c);
  pipeline::preprocess(c);
  pipeline::build_manifest(c);
}

struct CommandResult {
  int exit_code;
  std::string output;
};

CommandResult run_cli(const std::string& args) {
  const std::string cmd = std::string(XWALK_CLI_PATH) + " " + args + " 2>&1";
  std::string out;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

TEST(Pipeline, ToyRunProducesExpectedCounts) {
  TempDir dir;
  const auto c = toy_config(dir.path());
  EXPECT_EQ(pipeline::fetch_crosswalks(c)["crosswalks"], 30);
  EXPECT_EQ(pipeline::plan_routes(c)["routes"], 3);
  EXPECT_EQ(pipeline::gen_negatives(c)["negatives"], 10);
  EXPECT_EQ(pipeline::fetch_images(c)["downloaded"], 40);
  EXPECT_EQ(pipeline::preprocess(c)["written"], 40);
  pipeline::build_manifest(c);
  const auto m = read_manifest(dir / "manifest.jsonl");
  EXPECT_EQ(m.records.size(), 40u);
  EXPECT_EQ(m.name, "toyville");

  // Second pass is fully cached.
  EXPECT_EQ(pipeline::fetch_images(c)["cached"], 40);
}

TEST(Pipeline, MissingInputsNameTheArtifact) {
  TempDir dir;
  const auto c = toy_config(dir.path());
  try {
    pipeline::gen_negatives(c);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("crosswalks.csv"), std::string::npos);
  }
  EXPECT_THROW(pipeline::build_manifest(c), InputError);
}

TEST(Pipeline, SplitIsDeterministic) {
  TempDir dir;
  const auto c = toy_config(dir.path());
  run_acquisition(c);
  auto seeded = c;
  seeded.seed = 7;
  pipeline::split(seeded, std::nullopt, dir / "a.jsonl");
  pipeline::split(seeded, std::nullopt, dir / "b.jsonl");
  EXPECT_EQ(io::read_file(dir / "a.jsonl"), io::read_file(dir / "b.jsonl"));
  seeded.seed = 8;
  pipeline::split(seeded, std::nullopt, dir / "c.jsonl");
  EXPECT_NE(io::read_file(dir / "a.jsonl"), io::read_file(dir / "c.jsonl"));
}

TEST(Pipeline, EvaluateEndToEnd) {
  TempDir dir;
  const auto c = toy_config(dir.path());
  run_acquisition(c);
  pipeline::split(c);
  const auto split_path = dir / "manifest.split.jsonl";
  pipeline::make_experiment("intra", split_path, split_path, dir / "exp.json");
  const auto m = read_manifest(split_path);
  std::vector<PredictionRecord> preds;
  for (const auto& r : m.records)
    if (r.split == Split::test) preds.push_back({r.id, r.label == Label::crosswalk ? 0.8 : 0.3, r.label});
  io::write_file_atomic(dir / "preds.csv", format_predictions(preds));
  const auto rep = pipeline::evaluate({dir / "exp.json", split_path, dir / "preds.csv", split_path, {}, dir / "r.json"});
  EXPECT_EQ(rep["accuracy"], 1.0);
  EXPECT_EQ(rep["records"], preds.size());
  EXPECT_THROW(pipeline::evaluate({dir / "exp.json", split_path, dir / "none.csv", {}, {}, {}}), InputError);
}

TEST(Cli, FixtureRunAndErrors) {
  TempDir dir;
  const std::string common = "--config " + kToyConfig.string() + " --out " + dir.path().string();
  for (const char* stage : {"fetch-crosswalks", "plan-routes", "gen-negatives", "fetch-images", "preprocess",
                            "build-manifest"}) {
    const auto r = run_cli(std::string(stage) + " " + common);
    ASSERT_EQ(r.exit_code, 0) << stage << ": " << r.output;
  }
  const auto s1 = run_cli("split " + common + " --seed 7 --output " + (dir / "s1.jsonl").string());
  const auto s2 = run_cli("split " + common + " --seed 7 --output " + (dir / "s2.jsonl").string());
  ASSERT_EQ(s1.exit_code, 0) << s1.output;
  ASSERT_EQ(s2.exit_code, 0) << s2.output;
  EXPECT_EQ(io::read_file(dir / "s1.jsonl"), io::read_file(dir / "s2.jsonl"));

  const auto exp = run_cli("make-experiment --protocol intra --train-val " + (dir / "s1.jsonl").string() +
                           " --test " + (dir / "s1.jsonl").string() + " --output " + (dir / "e.json").string());
  ASSERT_EQ(exp.exit_code, 0) << exp.output;
  const auto ev = run_cli("evaluate --experiment " + (dir / "e.json").string() + " --manifest " +
                          (dir / "s1.jsonl").string() + " --predictions " + (dir / "nope.csv").string());
  EXPECT_EQ(ev.exit_code, 1);
  EXPECT_NE(ev.output.find("missing_input"), std::string::npos);
  EXPECT_NE(ev.output.find("nope.csv"), std::string::npos);

  io::write_file_atomic(dir / "live.toml", "network = \"live\"\n");
  const auto live = run_cli("fetch-crosswalks --config " + (dir / "live.toml").string() + " --fixtures " +
                            (kToyConfig.parent_path()).string() + " --region 0,0,0.1,0.1 --out " +
                            dir.path().string());
  EXPECT_EQ(live.exit_code, 1);
  EXPECT_NE(live.output.find("config_error"), std::string::npos) << live.output;
  EXPECT_NE(live.output.find("not permitted in fixture mode"), std::string::npos);
}

}  // namespace
}  // namespace xwalk

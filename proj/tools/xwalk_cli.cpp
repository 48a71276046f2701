// Command-line driver for the acquisition and evaluation pipeline.
#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "xwalk/config.hpp"
#include "xwalk/error.hpp"
#include "xwalk/io.hpp"
#include "xwalk/log.hpp"
#include "xwalk/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config;
  std::string region;
  std::optional<std::uint64_t> seed;
  std::string fixtures;
  std::optional<std::size_t> concurrency;
  std::string out;
  bool verbose = false;
};

enum class Stage { osm, routes, images, none };

xwalk::PipelineConfig resolve(const CommonOptions& o, Stage stage) {
  xwalk::PipelineConfig c;
  if (!o.config.empty()) c = xwalk::load_config(o.config);
  if (!o.region.empty()) {
    if (fs::exists(o.region)) {
      c.regions = o.region;
      c.inline_region.reset();
    } else {
      const auto commas = std::count(o.region.begin(), o.region.end(), ',');
      if (commas != 3 && commas != 4)
        throw xwalk::ConfigError("--region expects a file, south,west,north,east or name,south,west,north,east");
      const auto parsed = xwalk::parse_regions(commas == 3 ? "region," + o.region : o.region);
      c.inline_region = parsed.front();
    }
  }
  if (o.seed) c.seed = *o.seed;
  if (!o.fixtures.empty()) c.fixtures = fs::path(o.fixtures);
  if (!o.out.empty()) c.dataset_root = o.out;
  if (o.concurrency) {
    switch (stage) {
      case Stage::osm: c.osm_concurrency = *o.concurrency; break;
      case Stage::routes: c.route_concurrency = *o.concurrency; break;
      case Stage::images: c.image_concurrency = *o.concurrency; break;
      case Stage::none: break;
    }
  }
  xwalk::apply_environment(c);
  c.validate();
  return c;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "TOML-style configuration file");
  cmd->add_option("--region", o.region, "regions file, or an inline name,south,west,north,east");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--fixtures", o.fixtures, "replay recorded responses from this directory (no network)");
  cmd->add_option("--concurrency", o.concurrency, "worker bound for this stage");
  cmd->add_option("--out", o.out, "dataset root directory");
  cmd->add_flag("-v,--verbose", o.verbose, "log progress");
}

void emit(const nlohmann::ordered_json& summary) { std::cout << summary.dump(2) << '\n'; }

int fail(std::string_view kind, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Satellite crosswalk dataset acquisition and evaluation toolkit"};
  app.require_subcommand(1);
  CommonOptions o;

  auto* fetch_crosswalks = app.add_subcommand("fetch-crosswalks", "harvest highway=crossing nodes for each region");
  auto* plan_routes = app.add_subcommand("plan-routes", "chain crosswalks into waypoint batches and fetch route polylines");
  auto* gen_negatives = app.add_subcommand("gen-negatives", "densify routes and keep on-road points in the distance band");
  auto* fetch_images = app.add_subcommand("fetch-images", "download satellite tiles for every sample");
  auto* preprocess = app.add_subcommand("preprocess", "crop the logo strip from downloaded tiles");
  auto* build_manifest = app.add_subcommand("build-manifest", "bind samples, labels and images into a manifest");
  auto* split = app.add_subcommand("split", "assign train/val/test splits");
  auto* make_experiment = app.add_subcommand("make-experiment", "write an experiment spec");
  auto* evaluate = app.add_subcommand("evaluate", "score a predictions file for an experiment");
  auto* audit = app.add_subcommand("audit", "draw a manual-annotation worksheet");
  auto* annotation_error = app.add_subcommand("annotation-error", "summarise a completed worksheet");

  for (auto* cmd : {fetch_crosswalks, plan_routes, gen_negatives, fetch_images, preprocess, build_manifest, split,
                    make_experiment, evaluate, audit, annotation_error})
    add_common(cmd, o);

  std::string split_in, split_out;
  split->add_option("--manifest", split_in, "input manifest (default <out>/manifest.jsonl)");
  split->add_option("--output", split_out, "output manifest (default <out>/manifest.split.jsonl)");

  std::string protocol, train_val, test_manifest, output;
  make_experiment->add_option("--protocol", protocol, "intra | cross | cross_level")->required();
  make_experiment->add_option("--train-val", train_val, "train/val manifest")->required();
  make_experiment->add_option("--test", test_manifest, "test manifest")->required();
  make_experiment->add_option("--output", output, "experiment spec path");

  std::string experiment, predictions, train_manifest;
  std::optional<double> threshold;
  evaluate->add_option("--experiment", experiment, "experiment spec JSON")->required();
  evaluate->add_option("--manifest", test_manifest, "manifest of the test source")->required();
  evaluate->add_option("--predictions", predictions, "predictions CSV");
  evaluate->add_option("--train-manifest", train_manifest, "train/val manifest, enables the exclusivity check");
  evaluate->add_option("--threshold", threshold, "decision threshold override");
  evaluate->add_option("--output", output, "report path");

  std::string audit_manifest;
  std::size_t audit_n = 0;
  audit->add_option("--manifest", audit_manifest, "manifest to sample")->required();
  audit->add_option("-n,--count", audit_n, "records to audit")->required();
  audit->add_option("--output", output, "worksheet CSV path");

  std::string worksheet;
  annotation_error->add_option("--worksheet", worksheet, "completed worksheet CSV")->required();
  annotation_error->add_option("--output", output, "report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage_error", e.what());
  }

  try {
    if (o.verbose) xwalk::log::set_level(xwalk::log::Level::info);
    if (*fetch_crosswalks) emit(xwalk::pipeline::fetch_crosswalks(resolve(o, Stage::osm)));
    else if (*plan_routes) emit(xwalk::pipeline::plan_routes(resolve(o, Stage::routes)));
    else if (*gen_negatives) emit(xwalk::pipeline::gen_negatives(resolve(o, Stage::none)));
    else if (*fetch_images) emit(xwalk::pipeline::fetch_images(resolve(o, Stage::images)));
    else if (*preprocess) emit(xwalk::pipeline::preprocess(resolve(o, Stage::none)));
    else if (*build_manifest) emit(xwalk::pipeline::build_manifest(resolve(o, Stage::none)));
    else if (*split) {
      auto c = resolve(o, Stage::none);
      emit(xwalk::pipeline::split(c, split_in.empty() ? std::nullopt : std::optional<fs::path>(split_in),
                                  split_out.empty() ? std::nullopt : std::optional<fs::path>(split_out)));
    } else if (*make_experiment) {
      emit(xwalk::pipeline::make_experiment(protocol, train_val, test_manifest,
                                            output.empty() ? fs::path("experiment.json") : fs::path(output)));
    } else if (*evaluate) {
      if (predictions.empty()) throw xwalk::InputError("evaluate needs a predictions file (--predictions)");
      xwalk::pipeline::EvaluateArgs args{experiment, test_manifest, predictions, std::nullopt, threshold, std::nullopt};
      if (!train_manifest.empty()) args.train_manifest = fs::path(train_manifest);
      if (!output.empty()) args.output = fs::path(output);
      emit(xwalk::pipeline::evaluate(args));
    } else if (*audit) {
      emit(xwalk::pipeline::audit(audit_manifest, audit_n, o.seed.value_or(0),
                                  output.empty() ? fs::path("audit.csv") : fs::path(output)));
    } else if (*annotation_error) {
      emit(xwalk::pipeline::annotation_error(worksheet, output.empty() ? std::nullopt : std::optional<fs::path>(output)));
    }
  } catch (const xwalk::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("internal_error", e.what());
  }
  return 0;
}

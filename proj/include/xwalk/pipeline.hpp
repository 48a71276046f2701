#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "xwalk/config.hpp"
#include "xwalk/transport.hpp"

namespace xwalk::pipeline {

/// File names inside the dataset root.
namespace files {
inline constexpr std::string_view kCrosswalks = "crosswalks.csv";
inline constexpr std::string_view kRoutes = "routes.jsonl";
inline constexpr std::string_view kNegatives = "negatives.csv";
inline constexpr std::string_view kDownloadStatus = "download_status.jsonl";
inline constexpr std::string_view kManifest = "manifest.jsonl";
inline constexpr std::string_view kSplitManifest = "manifest.split.jsonl";
}  // namespace files

/// Each stage reads its predecessor's files under config.dataset_root,
/// writes its own, and returns a JSON summary. Missing inputs raise
/// InputError naming the artifact. When `transport` is null the stage opens
/// one from the config.
nlohmann::ordered_json fetch_crosswalks(const PipelineConfig& config, Transport* transport = nullptr);
nlohmann::ordered_json plan_routes(const PipelineConfig& config, Transport* transport = nullptr);
nlohmann::ordered_json gen_negatives(const PipelineConfig& config);
/// Writes the ledger, then throws QuotaExceeded if the quota ran out.
nlohmann::ordered_json fetch_images(const PipelineConfig& config, Transport* transport = nullptr);
nlohmann::ordered_json preprocess(const PipelineConfig& config);
nlohmann::ordered_json build_manifest(const PipelineConfig& config);
nlohmann::ordered_json split(const PipelineConfig& config,
                             std::optional<std::filesystem::path> input = std::nullopt,
                             std::optional<std::filesystem::path> output = std::nullopt);

nlohmann::ordered_json make_experiment(const std::string& protocol, const std::filesystem::path& train_val,
                                       const std::filesystem::path& test, const std::filesystem::path& output);

struct EvaluateArgs {
  std::filesystem::path experiment;
  std::filesystem::path test_manifest;
  std::filesystem::path predictions;
  std::optional<std::filesystem::path> train_manifest;
  std::optional<double> threshold;
  std::optional<std::filesystem::path> output;
};
nlohmann::ordered_json evaluate(const EvaluateArgs& args);

nlohmann::ordered_json audit(const std::filesystem::path& manifest, std::size_t n, std::uint64_t seed,
                             const std::filesystem::path& output);
nlohmann::ordered_json annotation_error(const std::filesystem::path& worksheet,
                                        std::optional<std::filesystem::path> output);

}  // namespace xwalk::pipeline

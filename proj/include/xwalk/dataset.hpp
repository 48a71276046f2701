#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xwalk/geo.hpp"
#include "xwalk/imagery.hpp"
#include "xwalk/osm_client.hpp"
#include "xwalk/sampler.hpp"

namespace xwalk {

enum class Label { crosswalk, no_crosswalk };
enum class Source { osm, route };
enum class Split { train, val, test, unassigned };

std::string_view to_string(Label label) noexcept;
std::string_view to_string(Source source) noexcept;
std::string_view to_string(Split split) noexcept;
Label parse_label(std::string_view text);
Source parse_source(std::string_view text);
Split parse_split(std::string_view text);

struct Locality {
  std::string city;
  std::string country;
  std::string continent;

  friend bool operator==(const Locality&, const Locality&) = default;
};

struct SampleRecord {
  std::string id;
  GeoPoint location;
  Label label = Label::crosswalk;
  Source source = Source::osm;
  Locality locality;
  Split split = Split::unassigned;
  std::string image_path;
  std::string status = "pending";

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct Manifest {
  std::string name;
  std::vector<SampleRecord> records;
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();
};

/// `<continent>/<country>/<city>/<label>/<lat7>_<lon7>`
std::string make_sample_id(const Locality& locality, Label label, const GeoPoint& location);

/// Positives from crosswalks then negatives, ids unique (first kept). Image
/// paths point at the preprocessed crop under `images/`.
std::vector<SampleRecord> collect_samples(std::span<const CrosswalkNode> crosswalks,
                                          std::span<const NegativeSample> negatives,
                                          const Locality& locality);

/// Download jobs for `records`, one per raw tile.
std::vector<TileJob> tile_jobs(std::span<const SampleRecord> records);

/// Directory names under the dataset root.
inline constexpr std::string_view kRawTileDir = "tiles";
inline constexpr std::string_view kImageDir = "images";

struct SplitRatios {
  double train = 0.70;
  double val = 0.10;
  double test = 0.20;
};

struct SplitCounts {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

/// floor(N * ratio) per split; the remainder goes to train.
SplitCounts split_counts(std::size_t n, const SplitRatios& ratios = {});

/// Deterministic Fisher-Yates over mt19937_64 (portable, unlike std::shuffle).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

/// Shuffles indices with `seed`, then labels the first train-count records
/// train, the next val, the rest test. Record order is unchanged.
Manifest assign_splits(Manifest manifest, const SplitRatios& ratios = {}, std::uint64_t seed = 0);

/// Concatenates records with split labels preserved. Throws MergeError
/// listing colliding ids.
Manifest merge(std::span<const Manifest> manifests, std::string name);

enum class LocalityLevel { city = 0, country = 1, continent = 2, world = 3 };
std::string_view to_string(LocalityLevel level) noexcept;

/// Coarsest level needed to describe every record's locality.
LocalityLevel locality_level(const Manifest& manifest);

enum class Protocol { intra, cross, cross_level };
std::string_view to_string(Protocol protocol) noexcept;
Protocol parse_protocol(std::string_view text);

struct ExperimentSpec {
  Protocol protocol = Protocol::intra;
  std::string train_val;
  std::string test;
  /// Level of the test source; informational in reports.
  LocalityLevel level = LocalityLevel::city;
};

/// Validates the protocol against the two manifests. Throws SpecError.
ExperimentSpec make_experiment(Protocol protocol, const Manifest& train_val, const Manifest& test);

/// Ids evaluated by `spec`: always the test split of the test source.
std::vector<std::string> evaluation_ids(const ExperimentSpec& spec, const Manifest& test_manifest);

/// Throws SpecError if any evaluated id appears in the train or val split of
/// the train/val source.
void check_exclusivity(const ExperimentSpec& spec, const Manifest& train_val,
                       const Manifest& test_manifest);

std::string format_experiment(const ExperimentSpec& spec);
ExperimentSpec parse_experiment(std::string_view json_text);

struct AuditRow {
  std::string id;
  std::string image_path;
  Label auto_label = Label::crosswalk;
  std::optional<Label> manual_label;
};

std::vector<AuditRow> audit_sample(const Manifest& manifest, std::size_t n, std::uint64_t seed);

struct AnnotationErrorReport {
  std::size_t records = 0;
  std::size_t disagreements = 0;
  std::size_t auto_positive = 0;
  std::size_t auto_negative = 0;
  std::size_t false_positive_annotations = 0;  // auto crosswalk, manual no_crosswalk
  std::size_t false_negative_annotations = 0;  // auto no_crosswalk, manual crosswalk
  double overall_rate = 0.0;
  /// Over auto-positives / auto-negatives; empty when that class is absent.
  std::optional<double> false_positive_rate;
  std::optional<double> false_negative_rate;
};

AnnotationErrorReport annotation_error(std::span<const AuditRow> worksheet);
nlohmann::ordered_json to_json(const AnnotationErrorReport& report);

/// `id,image_path,auto_label,manual_label`
std::string format_worksheet(std::span<const AuditRow> rows);
std::vector<AuditRow> parse_worksheet(std::string_view text);

nlohmann::ordered_json to_json(const SampleRecord& record);
SampleRecord record_from_json(const nlohmann::json& j);

std::string format_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view jsonl, std::string name);

/// Writes `<path>` (JSONL) and `<path>.meta.json` (name, provenance).
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
/// Reads the JSONL and, when present, the sidecar; name falls back to the
/// file stem.
Manifest read_manifest(const std::filesystem::path& path);
std::filesystem::path manifest_meta_path(const std::filesystem::path& manifest_path);

}  // namespace xwalk

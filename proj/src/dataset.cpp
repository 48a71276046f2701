#include "xwalk/dataset.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "xwalk/error.hpp"
#include "xwalk/io.hpp"

namespace xwalk {

std::string_view to_string(Label label) noexcept {
  return label == Label::crosswalk ? "crosswalk" : "no_crosswalk";
}

std::string_view to_string(Source source) noexcept {
  return source == Source::osm ? "osm" : "route";
}

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    case Split::unassigned: break;
  }
  return "unassigned";
}

Label parse_label(std::string_view text) {
  if (text == "crosswalk") return Label::crosswalk;
  if (text == "no_crosswalk") return Label::no_crosswalk;
  throw FormatError("unknown label '" + std::string(text) + "'");
}

Source parse_source(std::string_view text) {
  if (text == "osm") return Source::osm;
  if (text == "route") return Source::route;
  throw FormatError("unknown source '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "val") return Split::val;
  if (text == "test") return Split::test;
  if (text == "unassigned") return Split::unassigned;
  throw FormatError("unknown split '" + std::string(text) + "'");
}

std::string make_sample_id(const Locality& locality, Label label, const GeoPoint& location) {
  return fmt::format("{}/{}/{}/{}/{}_{}", locality.continent, locality.country, locality.city,
                     to_string(label), format_coord(location.lat), format_coord(location.lon));
}

namespace {

void check_locality(const Locality& l) {
  for (const auto* part : {&l.city, &l.country, &l.continent}) {
    if (part->empty()) throw ConfigError("locality fields must be non-empty");
    if (part->find_first_of(",/\n\"") != std::string::npos)
      throw ConfigError("locality '" + *part + "' contains a reserved character");
  }
}

bool usable(const SampleRecord& r) { return r.status == "available"; }

SampleRecord make_record(const Locality& locality, Label label, const GeoPoint& location) {
  SampleRecord r;
  r.label = label;
  r.source = label == Label::crosswalk ? Source::osm : Source::route;
  r.location = location;
  r.locality = locality;
  r.id = make_sample_id(locality, label, location);
  r.image_path = (std::filesystem::path(std::string(kImageDir)) /
                  tile_relative_path(to_string(label), location))
                     .generic_string();
  return r;
}

}  // namespace

std::vector<SampleRecord> collect_samples(std::span<const CrosswalkNode> crosswalks,
                                          std::span<const NegativeSample> negatives,
                                          const Locality& locality) {
  check_locality(locality);
  std::vector<SampleRecord> out;
  std::unordered_set<std::string> ids;
  auto add = [&](SampleRecord r) {
    if (ids.insert(r.id).second) out.push_back(std::move(r));
  };
  for (const auto& c : crosswalks) add(make_record(locality, Label::crosswalk, c.location));
  for (const auto& n : negatives) add(make_record(locality, Label::no_crosswalk, n.location));
  return out;
}

std::vector<TileJob> tile_jobs(std::span<const SampleRecord> records) {
  std::vector<TileJob> jobs;
  jobs.reserve(records.size());
  for (const auto& r : records)
    jobs.push_back({r.id, r.location, tile_relative_path(to_string(r.label), r.location)});
  return jobs;
}

SplitCounts split_counts(std::size_t n, const SplitRatios& ratios) {
  if (!(ratios.train > 0 && ratios.val > 0 && ratios.test > 0))
    throw SplitError("split ratios must be positive");
  if (std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
    throw SplitError("split ratios must sum to 1");
  if (n < 3) throw SplitError(fmt::format("need at least 3 records to split, got {}", n));
  // The epsilon absorbs representation error such as 10 * 0.7 = 6.999...
  auto part = [n](double r) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * r + 1e-9));
  };
  SplitCounts c{part(ratios.train), part(ratios.val), part(ratios.test)};
  c.train += n - (c.train + c.val + c.test);
  return c;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    // Unbiased draw in [0, i) by rejection.
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = 0;
    do draw = rng();
    while (draw >= limit);
    std::swap(perm[i - 1], perm[static_cast<std::size_t>(draw % bound)]);
  }
  return perm;
}

Manifest assign_splits(Manifest manifest, const SplitRatios& ratios, std::uint64_t seed) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    if (usable(manifest.records[i])) eligible.push_back(i);
    else manifest.records[i].split = Split::unassigned;
  }
  const auto counts = split_counts(eligible.size(), ratios);
  const auto perm = seeded_permutation(eligible.size(), seed);
  for (std::size_t k = 0; k < perm.size(); ++k) {
    auto& record = manifest.records[eligible[perm[k]]];
    record.split = k < counts.train ? Split::train
                   : k < counts.train + counts.val ? Split::val
                                                   : Split::test;
  }
  manifest.provenance["split_seed"] = seed;
  manifest.provenance["split_ratios"] = {ratios.train, ratios.val, ratios.test};
  return manifest;
}

Manifest merge(std::span<const Manifest> manifests, std::string name) {
  Manifest merged;
  merged.name = std::move(name);
  std::unordered_map<std::string, std::string> owner;
  std::vector<std::string> collisions;
  auto sources = nlohmann::ordered_json::array();
  std::size_t total = 0;
  for (const auto& m : manifests) total += m.records.size();
  merged.records.reserve(total);
  for (const auto& m : manifests) {
    sources.push_back(m.name);
    for (const auto& r : m.records) {
      auto [it, inserted] = owner.emplace(r.id, m.name);
      if (!inserted) {
        collisions.push_back(r.id + " (" + it->second + ", " + m.name + ")");
        continue;
      }
      merged.records.push_back(r);
    }
  }
  if (!collisions.empty()) {
    std::string list;
    for (std::size_t i = 0; i < collisions.size() && i < 20; ++i) list += (i ? "; " : "") + collisions[i];
    throw MergeError(fmt::format("{} id collision(s): {}", collisions.size(), list));
  }
  merged.provenance["merged_from"] = std::move(sources);
  return merged;
}

std::string_view to_string(LocalityLevel level) noexcept {
  switch (level) {
    case LocalityLevel::city: return "city";
    case LocalityLevel::country: return "country";
    case LocalityLevel::continent: return "continent";
    case LocalityLevel::world: break;
  }
  return "world";
}

LocalityLevel locality_level(const Manifest& manifest) {
  std::set<std::string> cities, countries, continents;
  for (const auto& r : manifest.records) {
    continents.insert(r.locality.continent);
    countries.insert(r.locality.continent + "/" + r.locality.country);
    cities.insert(r.locality.continent + "/" + r.locality.country + "/" + r.locality.city);
  }
  if (continents.size() > 1) return LocalityLevel::world;
  if (countries.size() > 1) return LocalityLevel::continent;
  if (cities.size() > 1) return LocalityLevel::country;
  return LocalityLevel::city;
}

std::string_view to_string(Protocol protocol) noexcept {
  switch (protocol) {
    case Protocol::intra: return "intra";
    case Protocol::cross: return "cross";
    case Protocol::cross_level: break;
  }
  return "cross_level";
}

Protocol parse_protocol(std::string_view text) {
  if (text == "intra") return Protocol::intra;
  if (text == "cross") return Protocol::cross;
  if (text == "cross_level" || text == "cross-level") return Protocol::cross_level;
  throw SpecError("unknown protocol '" + std::string(text) + "'");
}

namespace {

bool has_split(const Manifest& m, Split s) {
  return std::any_of(m.records.begin(), m.records.end(), [s](const auto& r) { return r.split == s; });
}

}  // namespace

ExperimentSpec make_experiment(Protocol protocol, const Manifest& train_val, const Manifest& test) {
  if (!has_split(train_val, Split::train))
    throw SpecError("manifest '" + train_val.name + "' has no train split assigned");
  if (!has_split(test, Split::test))
    throw SpecError("manifest '" + test.name + "' has no test split assigned");
  const auto train_level = locality_level(train_val);
  const auto test_level = locality_level(test);
  switch (protocol) {
    case Protocol::intra:
      if (train_val.name != test.name)
        throw SpecError("intra experiments train and test on the same source");
      break;
    case Protocol::cross:
      if (train_val.name == test.name)
        throw SpecError("cross experiments need different sources, got '" + test.name + "' twice");
      if (train_level != test_level)
        throw SpecError(fmt::format("cross experiments compare sources at one level ({} vs {})",
                                    to_string(train_level), to_string(test_level)));
      break;
    case Protocol::cross_level:
      if (train_val.name == test.name)
        throw SpecError("cross_level experiments need different sources");
      if (static_cast<int>(train_level) <= static_cast<int>(test_level))
        throw SpecError(fmt::format("cross_level trains at a higher level than it tests ({} vs {})",
                                    to_string(train_level), to_string(test_level)));
      break;
  }
  return {protocol, train_val.name, test.name, test_level};
}

std::vector<std::string> evaluation_ids(const ExperimentSpec& spec, const Manifest& test_manifest) {
  if (test_manifest.name != spec.test)
    throw SpecError("experiment tests on '" + spec.test + "' but manifest is '" + test_manifest.name + "'");
  std::vector<std::string> ids;
  for (const auto& r : test_manifest.records)
    if (r.split == Split::test) ids.push_back(r.id);
  return ids;
}

void check_exclusivity(const ExperimentSpec& spec, const Manifest& train_val,
                       const Manifest& test_manifest) {
  if (train_val.name != spec.train_val)
    throw SpecError("experiment trains on '" + spec.train_val + "' but manifest is '" + train_val.name + "'");
  std::unordered_set<std::string> seen;
  for (const auto& r : train_val.records)
    if (r.split == Split::train || r.split == Split::val) seen.insert(r.id);
  std::vector<std::string> leaked;
  for (const auto& id : evaluation_ids(spec, test_manifest))
    if (seen.contains(id)) leaked.push_back(id);
  if (!leaked.empty())
    throw SpecError(fmt::format("{} evaluated id(s) were used for training/validation, first: {}",
                                leaked.size(), leaked.front()));
}

std::string format_experiment(const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["protocol"] = to_string(spec.protocol);
  j["train_val"] = spec.train_val;
  j["test"] = spec.test;
  j["level"] = to_string(spec.level);
  return j.dump(2) + "\n";
}

ExperimentSpec parse_experiment(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    ExperimentSpec spec;
    spec.protocol = parse_protocol(j.at("protocol").get<std::string>());
    spec.train_val = j.at("train_val").get<std::string>();
    spec.test = j.at("test").get<std::string>();
    const auto level = j.value("level", std::string("city"));
    spec.level = level == "world"       ? LocalityLevel::world
                 : level == "continent" ? LocalityLevel::continent
                 : level == "country"   ? LocalityLevel::country
                                        : LocalityLevel::city;
    return spec;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed experiment spec: " + std::string(e.what()), e.byte);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("experiment spec: ") + e.what());
  }
}

std::vector<AuditRow> audit_sample(const Manifest& manifest, std::size_t n, std::uint64_t seed) {
  if (n > manifest.records.size())
    throw AuditError(fmt::format("audit of {} records requested from a manifest of {}", n,
                                 manifest.records.size()));
  const auto perm = seeded_permutation(manifest.records.size(), seed);
  std::vector<AuditRow> rows;
  rows.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = manifest.records[perm[k]];
    rows.push_back({r.id, r.image_path, r.label, std::nullopt});
  }
  return rows;
}

AnnotationErrorReport annotation_error(std::span<const AuditRow> worksheet) {
  std::vector<std::string> blank;
  for (const auto& row : worksheet)
    if (!row.manual_label) blank.push_back(row.id);
  if (!blank.empty()) {
    std::string list;
    for (std::size_t i = 0; i < blank.size() && i < 20; ++i) list += (i ? ", " : "") + blank[i];
    throw AuditError(fmt::format("{} worksheet row(s) lack a manual label: {}", blank.size(), list));
  }
  if (worksheet.empty()) throw AuditError("empty worksheet");
  AnnotationErrorReport rep;
  rep.records = worksheet.size();
  for (const auto& row : worksheet) {
    const bool auto_pos = row.auto_label == Label::crosswalk;
    (auto_pos ? rep.auto_positive : rep.auto_negative)++;
    if (row.auto_label == *row.manual_label) continue;
    ++rep.disagreements;
    (auto_pos ? rep.false_positive_annotations : rep.false_negative_annotations)++;
  }
  rep.overall_rate = static_cast<double>(rep.disagreements) / static_cast<double>(rep.records);
  if (rep.auto_positive)
    rep.false_positive_rate =
        static_cast<double>(rep.false_positive_annotations) / static_cast<double>(rep.auto_positive);
  if (rep.auto_negative)
    rep.false_negative_rate =
        static_cast<double>(rep.false_negative_annotations) / static_cast<double>(rep.auto_negative);
  return rep;
}

namespace {
nlohmann::ordered_json rounded4(std::optional<double> v) {
  if (!v) return nullptr;
  return std::round(*v * 1e4) / 1e4;
}
}  // namespace

nlohmann::ordered_json to_json(const AnnotationErrorReport& r) {
  nlohmann::ordered_json j;
  j["records"] = r.records;
  j["disagreements"] = r.disagreements;
  j["auto_positive"] = r.auto_positive;
  j["auto_negative"] = r.auto_negative;
  j["false_positive_annotations"] = r.false_positive_annotations;
  j["false_negative_annotations"] = r.false_negative_annotations;
  j["annotation_error"] = rounded4(r.overall_rate);
  j["false_positive_rate"] = rounded4(r.false_positive_rate);
  j["false_negative_rate"] = rounded4(r.false_negative_rate);
  return j;
}

std::string format_worksheet(std::span<const AuditRow> rows) {
  std::string out = "id,image_path,auto_label,manual_label\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{}\n", r.id, r.image_path, to_string(r.auto_label),
                       r.manual_label ? to_string(*r.manual_label) : std::string_view{});
  return out;
}

std::vector<AuditRow> parse_worksheet(std::string_view text) {
  std::vector<AuditRow> rows;
  const auto lines = io::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (io::trim(lines[i]).empty()) continue;
    if (i == 0 && lines[i].starts_with("id,")) continue;
    const auto f = io::split_fields(lines[i]);
    if (f.size() != 4)
      throw FormatError(fmt::format("worksheet line {}: expected id,image_path,auto_label,manual_label", i + 1));
    AuditRow row{std::string(io::trim(f[0])), std::string(io::trim(f[1])), parse_label(io::trim(f[2])),
                 std::nullopt};
    if (!io::trim(f[3]).empty()) row.manual_label = parse_label(io::trim(f[3]));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::ordered_json to_json(const SampleRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["lat"] = r.location.lat;
  j["lon"] = r.location.lon;
  j["label"] = to_string(r.label);
  j["source"] = to_string(r.source);
  j["city"] = r.locality.city;
  j["country"] = r.locality.country;
  j["continent"] = r.locality.continent;
  j["split"] = to_string(r.split);
  j["image_path"] = r.image_path;
  j["status"] = r.status;
  return j;
}

SampleRecord record_from_json(const nlohmann::json& j) {
  SampleRecord r;
  r.id = j.at("id").get<std::string>();
  r.location = GeoPoint::checked(j.at("lat").get<double>(), j.at("lon").get<double>());
  r.label = parse_label(j.at("label").get<std::string>());
  r.source = parse_source(j.at("source").get<std::string>());
  r.locality = {j.at("city").get<std::string>(), j.at("country").get<std::string>(),
                j.at("continent").get<std::string>()};
  r.split = parse_split(j.at("split").get<std::string>());
  r.image_path = j.at("image_path").get<std::string>();
  r.status = j.at("status").get<std::string>();
  if ((r.label == Label::crosswalk) != (r.source == Source::osm))
    throw FormatError("record " + r.id + ": label and source disagree");
  return r;
}

namespace {

// Hand-assembled so coordinates keep exactly seven decimals.
std::string record_line(const SampleRecord& r) {
  auto q = [](std::string_view s) { return nlohmann::json(s).dump(); };
  return fmt::format(
      "{{\"id\":{},\"lat\":{},\"lon\":{},\"label\":{},\"source\":{},\"city\":{},"
      "\"country\":{},\"continent\":{},\"split\":{},\"image_path\":{},\"status\":{}}}\n",
      q(r.id), format_coord(r.location.lat), format_coord(r.location.lon), q(to_string(r.label)),
      q(to_string(r.source)), q(r.locality.city), q(r.locality.country), q(r.locality.continent),
      q(to_string(r.split)), q(r.image_path), q(r.status));
}

}  // namespace

std::string format_manifest(const Manifest& manifest) {
  std::string out;
  for (const auto& r : manifest.records) out += record_line(r);
  return out;
}

Manifest parse_manifest(std::string_view jsonl, std::string name) {
  Manifest m;
  m.name = std::move(name);
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  for (auto line : io::split_lines(jsonl)) {
    ++line_no;
    if (io::trim(line).empty()) continue;
    try {
      auto record = record_from_json(nlohmann::json::parse(line));
      if (!ids.insert(record.id).second)
        throw FormatError(fmt::format("manifest line {}: duplicate id {}", line_no, record.id));
      m.records.push_back(std::move(record));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(fmt::format("manifest line {}: {}", line_no, e.what()), e.byte);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(fmt::format("manifest line {}: {}", line_no, e.what()));
    }
  }
  return m;
}

std::filesystem::path manifest_meta_path(const std::filesystem::path& manifest_path) {
  auto p = manifest_path;
  p += ".meta.json";
  return p;
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  io::write_file_atomic(path, format_manifest(manifest));
  nlohmann::ordered_json meta;
  meta["name"] = manifest.name;
  meta["records"] = manifest.records.size();
  meta["provenance"] = manifest.provenance;
  io::write_file_atomic(manifest_meta_path(path), meta.dump(2) + "\n");
}

Manifest read_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("manifest not found: " + path.string());
  std::string name = path.stem().string();
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();
  const auto meta_path = manifest_meta_path(path);
  if (std::filesystem::exists(meta_path)) {
    try {
      const auto meta = nlohmann::ordered_json::parse(io::read_file(meta_path));
      name = meta.value("name", name);
      if (meta.contains("provenance")) provenance = meta["provenance"];
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("manifest sidecar " + meta_path.string() + ": " + e.what());
    }
  }
  auto m = parse_manifest(io::read_file(path), name);
  m.provenance = std::move(provenance);
  return m;
}

}  // namespace xwalk

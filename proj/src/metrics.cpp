#include "xwalk/metrics.hpp"

#include <fmt/format.h>

#include <cmath>
#include <unordered_map>

#include "xwalk/error.hpp"
#include "xwalk/io.hpp"

namespace xwalk {

std::vector<PredictionRecord> parse_predictions(std::string_view csv) {
  std::vector<PredictionRecord> out;
  const auto lines = io::split_lines(csv);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (io::trim(lines[i]).empty()) continue;
    if (i == 0 && lines[i].starts_with("id,")) continue;
    const auto f = io::split_fields(lines[i]);
    if (f.size() != 3)
      throw FormatError(fmt::format("predictions line {}: expected id,score,predicted_label", i + 1));
    PredictionRecord p{std::string(io::trim(f[0])), io::parse_double(f[1], "score"),
                       parse_label(io::trim(f[2]))};
    if (!(p.score >= 0.0 && p.score <= 1.0))
      throw FormatError(fmt::format("predictions line {}: score {} outside [0, 1]", i + 1, p.score));
    out.push_back(std::move(p));
  }
  return out;
}

std::string format_predictions(std::span<const PredictionRecord> predictions) {
  std::string out = "id,score,predicted_label\n";
  for (const auto& p : predictions)
    out += fmt::format("{},{:.6f},{}\n", p.id, p.score, to_string(p.predicted_label));
  return out;
}

namespace {

std::string list_some(const std::vector<std::string>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size() && i < 10; ++i) s += (i ? ", " : "") + ids[i];
  if (ids.size() > 10) s += fmt::format(", ... ({} total)", ids.size());
  return s;
}

}  // namespace

ConfusionCounts tally(std::span<const PredictionRecord> predictions, const Manifest& manifest,
                      Split split, std::optional<double> threshold) {
  std::unordered_map<std::string, Label> truth;
  for (const auto& r : manifest.records)
    if (r.split == split) truth.emplace(r.id, r.label);

  std::unordered_map<std::string, int> seen;
  std::vector<std::string> unknown, duplicate;
  ConfusionCounts c;
  for (const auto& p : predictions) {
    auto it = truth.find(p.id);
    if (it == truth.end()) {
      unknown.push_back(p.id);
      continue;
    }
    if (++seen[p.id] > 1) {
      duplicate.push_back(p.id);
      continue;
    }
    const Label predicted = threshold ? (p.score >= *threshold ? Label::crosswalk : Label::no_crosswalk)
                                      : p.predicted_label;
    const bool actual_pos = it->second == Label::crosswalk;
    const bool pred_pos = predicted == Label::crosswalk;
    if (actual_pos && pred_pos) ++c.tp;
    else if (!actual_pos && pred_pos) ++c.fp;
    else if (!actual_pos && !pred_pos) ++c.tn;
    else ++c.fn;
  }
  std::vector<std::string> missing;
  for (const auto& r : manifest.records)
    if (r.split == split && !seen.contains(r.id)) missing.push_back(r.id);

  std::string problems;
  if (!unknown.empty())
    problems += fmt::format("{} id(s) not in the {} split: {}. ", unknown.size(), to_string(split), list_some(unknown));
  if (!duplicate.empty())
    problems += fmt::format("{} duplicate prediction(s): {}. ", duplicate.size(), list_some(duplicate));
  if (!missing.empty())
    problems += fmt::format("{} record(s) without a prediction: {}. ", missing.size(), list_some(missing));
  if (!problems.empty()) throw TallyError(problems);
  return c;
}

double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw UndefinedMetric("accuracy of zero records");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double precision(const ConfusionCounts& c) {
  if (c.tp + c.fp == 0) throw UndefinedMetric("precision without positive predictions");
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double recall(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0) throw UndefinedMetric("recall without positive records");
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double f1(const ConfusionCounts& c) {
  if (c.tp == 0) {
    if (c.fp == 0 && c.fn == 0) throw UndefinedMetric("F1 with no positives predicted or present");
    return 0.0;
  }
  const double p = precision(c);
  const double r = recall(c);
  return 2.0 * p * r / (p + r);
}

ExperimentReport report(const ExperimentSpec& spec, const Manifest& test_manifest,
                        std::span<const PredictionRecord> predictions, std::optional<double> threshold) {
  // Validates the source name as a side effect.
  evaluation_ids(spec, test_manifest);
  ExperimentReport rep;
  rep.spec = spec;
  rep.counts = tally(predictions, test_manifest, Split::test, threshold);
  rep.accuracy = accuracy(rep.counts);
  rep.f1 = f1(rep.counts);
  if (rep.counts.tp + rep.counts.fp) rep.precision = precision(rep.counts);
  if (rep.counts.tp + rep.counts.fn) rep.recall = recall(rep.counts);
  rep.threshold = threshold.value_or(kDefaultThreshold);
  rep.threshold_overridden = threshold.has_value();
  return rep;
}

namespace {
double round4(double v) { return std::round(v * 1e4) / 1e4; }
}  // namespace

nlohmann::ordered_json to_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["protocol"] = to_string(r.spec.protocol);
  j["level"] = to_string(r.spec.level);
  j["train_val"] = r.spec.train_val;
  j["test"] = r.spec.test;
  j["records"] = r.counts.total();
  j["tp"] = r.counts.tp;
  j["fp"] = r.counts.fp;
  j["tn"] = r.counts.tn;
  j["fn"] = r.counts.fn;
  j["accuracy"] = round4(r.accuracy);
  j["f1"] = round4(r.f1);
  j["precision"] = r.precision ? nlohmann::ordered_json(round4(*r.precision)) : nlohmann::ordered_json(nullptr);
  j["recall"] = r.recall ? nlohmann::ordered_json(round4(*r.recall)) : nlohmann::ordered_json(nullptr);
  j["threshold"] = r.threshold;
  return j;
}

}  // namespace xwalk

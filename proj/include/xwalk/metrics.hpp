#pragma once

#include <cstddef>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xwalk/dataset.hpp"

namespace xwalk {

/// Crosswalk is the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline constexpr double kDefaultThreshold = 0.5;

struct PredictionRecord {
  std::string id;
  double score = 0.0;
  Label predicted_label = Label::no_crosswalk;
};

/// `id,score,predicted_label` with an optional header row.
std::vector<PredictionRecord> parse_predictions(std::string_view csv);
std::string format_predictions(std::span<const PredictionRecord> predictions);

/// Scores the records of `split`. Uses each prediction's label, or
/// `score >= threshold` when a threshold is given. Throws TallyError on
/// missing, duplicate or unknown ids.
ConfusionCounts tally(std::span<const PredictionRecord> predictions, const Manifest& manifest,
                      Split split = Split::test, std::optional<double> threshold = std::nullopt);

/// Throws UndefinedMetric on empty counts.
double accuracy(const ConfusionCounts& c);
/// Throw UndefinedMetric when the denominator is zero.
double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
/// 0 when tp == 0 but errors exist; UndefinedMetric when tp = fp = fn = 0.
double f1(const ConfusionCounts& c);

struct ExperimentReport {
  ExperimentSpec spec;
  ConfusionCounts counts;
  double accuracy = 0.0;
  double f1 = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  double threshold = kDefaultThreshold;
  bool threshold_overridden = false;
};

ExperimentReport report(const ExperimentSpec& spec, const Manifest& test_manifest,
                        std::span<const PredictionRecord> predictions,
                        std::optional<double> threshold = std::nullopt);

/// Metric values rounded to four decimals.
nlohmann::ordered_json to_json(const ExperimentReport& report);

}  // namespace xwalk

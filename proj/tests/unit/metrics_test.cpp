#include <gtest/gtest.h>

#include "xwalk/dataset.hpp"
#include "xwalk/error.hpp"
#include "xwalk/metrics.hpp"

namespace xwalk {
namespace {

// Independent oracle: harmonic mean of precision and recall.
std::optional<double> oracle_f1(const ConfusionCounts& c) {
  if (c.tp + c.fp + c.fn == 0) return std::nullopt;
  if (c.tp == 0) return 0.0;
  const double p = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double r = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return 2.0 / (1.0 / p + 1.0 / r);
}

TEST(Metrics, Examples) {
  EXPECT_DOUBLE_EQ(accuracy({1, 0, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(accuracy({40, 10, 40, 10}), 0.8);
  EXPECT_DOUBLE_EQ(accuracy({0, 0, 0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(precision({40, 10, 40, 10}), 0.8);
  EXPECT_DOUBLE_EQ(recall({40, 10, 40, 10}), 0.8);
  EXPECT_DOUBLE_EQ(f1({40, 10, 40, 10}), 0.8);
  EXPECT_DOUBLE_EQ(f1({1, 0, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(f1({0, 5, 5, 5}), 0.0);
  EXPECT_THROW(accuracy({}), UndefinedMetric);
  EXPECT_THROW(f1({0, 0, 7, 0}), UndefinedMetric);
  EXPECT_THROW(precision({0, 0, 3, 3}), UndefinedMetric);
}

TEST(Metrics, ExhaustiveAgainstOracle) {
  for (std::size_t tp = 0; tp <= 20; ++tp)
    for (std::size_t fp = 0; fp <= 20; ++fp)
      for (std::size_t tn = 0; tn <= 20; ++tn)
        for (std::size_t fn = 0; fn <= 20; ++fn) {
          const ConfusionCounts c{tp, fp, tn, fn};
          if (c.total() == 0) continue;
          const double acc = static_cast<double>(tp + tn) / static_cast<double>(c.total());
          ASSERT_NEAR(accuracy(c), acc, 1e-12);
          const auto want = oracle_f1(c);
          if (want) {
            ASSERT_NEAR(f1(c), *want, 1e-12);
          } else {
            ASSERT_THROW(f1(c), UndefinedMetric);
          }
          // Swapping the two classes keeps accuracy.
          ASSERT_NEAR(accuracy({tn, fn, tp, fp}), acc, 1e-12);
        }
}

Manifest toy_manifest() {
  Manifest m;
  m.name = "toy";
  const Locality loc{"c", "k", "e"};
  for (int i = 0; i < 10; ++i) {
    SampleRecord r;
    r.location = {0.001 * i, 0};
    r.label = i < 5 ? Label::crosswalk : Label::no_crosswalk;
    r.source = i < 5 ? Source::osm : Source::route;
    r.locality = loc;
    r.id = make_sample_id(loc, r.label, r.location);
    r.split = i < 8 ? Split::test : Split::train;
    r.status = "available";
    m.records.push_back(r);
  }
  return m;
}

std::vector<PredictionRecord> predict(const Manifest& m, const std::vector<int>& flip, double score_pos = 0.9) {
  std::vector<PredictionRecord> out;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    const auto& r = m.records[i];
    if (r.split != Split::test) continue;
    bool pos = r.label == Label::crosswalk;
    if (std::find(flip.begin(), flip.end(), static_cast<int>(i)) != flip.end()) pos = !pos;
    out.push_back({r.id, pos ? score_pos : 0.1, pos ? Label::crosswalk : Label::no_crosswalk});
  }
  return out;
}

TEST(Tally, HandCountedFixture) {
  const auto m = toy_manifest();  // test split: 5 positives (0-4), 3 negatives (5-7)
  EXPECT_EQ(tally(predict(m, {}), m), (ConfusionCounts{5, 0, 3, 0}));
  EXPECT_EQ(tally(predict(m, {0, 1, 2, 3, 4, 5, 6, 7}), m), (ConfusionCounts{0, 3, 0, 5}));
  EXPECT_EQ(tally(predict(m, {1, 6}), m), (ConfusionCounts{4, 1, 2, 1}));
  // Threshold override reads scores, not labels.
  auto preds = predict(m, {});
  for (auto& p : preds) p.predicted_label = Label::no_crosswalk;
  EXPECT_EQ(tally(preds, m, Split::test, 0.5), (ConfusionCounts{5, 0, 3, 0}));
}

TEST(Tally, MismatchedPredictionsAreErrors) {
  const auto m = toy_manifest();
  auto preds = predict(m, {});
  auto missing = preds;
  missing.pop_back();
  EXPECT_THROW(tally(missing, m), TallyError);
  auto dup = preds;
  dup.push_back(dup.front());
  EXPECT_THROW(tally(dup, m), TallyError);
  auto unknown = preds;
  unknown.push_back({"nope", 0.2, Label::no_crosswalk});
  EXPECT_THROW(tally(unknown, m), TallyError);
}

TEST(Predictions, CsvRoundTripAndValidation) {
  const std::vector<PredictionRecord> preds{{"a/b", 0.25, Label::no_crosswalk}, {"c", 1.0, Label::crosswalk}};
  const auto back = parse_predictions(format_predictions(preds));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].id, "a/b");
  EXPECT_DOUBLE_EQ(back[0].score, 0.25);
  EXPECT_EQ(back[1].predicted_label, Label::crosswalk);
  EXPECT_THROW(parse_predictions("x,1.5,crosswalk\n"), FormatError);
  EXPECT_THROW(parse_predictions("x,0.5\n"), FormatError);
}

TEST(Report, EchoesOracleValues) {
  const auto m = toy_manifest();
  const ExperimentSpec spec = make_experiment(Protocol::intra, m, m);
  const auto rep = report(spec, m, predict(m, {1, 6}));
  EXPECT_EQ(rep.counts.total(), 8u);
  EXPECT_DOUBLE_EQ(rep.accuracy, 6.0 / 8.0);
  EXPECT_NEAR(rep.f1, *oracle_f1({4, 1, 2, 1}), 1e-12);
  const auto j = to_json(rep);
  EXPECT_EQ(j["accuracy"], 0.75);
  EXPECT_EQ(j["f1"], 0.8);
}

}  // namespace
}  // namespace xwalk

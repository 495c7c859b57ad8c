#include <doctest.h>

#include <random>
#include <sstream>

#include "vocabtrend/error.hpp"
#include "vocabtrend/evaluation.hpp"

using namespace vocabtrend;

namespace {

AiScoreTable table(std::vector<std::pair<std::string, double>> entries) {
  AiScoreTable t;
  for (auto& [w, s] : entries) {
    t.words.push_back(w);
    t.raw.push_back(s);
    t.score.push_back(s);
  }
  return t;
}

// |interest| = i, |actual| = a, overlap tp.
std::pair<LemmaSet, LemmaSet> sets(std::size_t i, std::size_t a, std::size_t tp) {
  LemmaSet interest, actual;
  for (std::size_t k = 0; k < tp; ++k) {
    interest.insert("both" + std::to_string(k));
    actual.insert("both" + std::to_string(k));
  }
  for (std::size_t k = tp; k < i; ++k) interest.insert("pred" + std::to_string(k));
  for (std::size_t k = tp; k < a; ++k) actual.insert("exam" + std::to_string(k));
  return {interest, actual};
}

}  // namespace

TEST_CASE("exam vocabulary is deduplicated after lemmatization") {
  const LemmaMap map(std::unordered_map<std::string, std::string>{{"cats", "cat"}});
  CHECK(extract_exam_vocab(YearDocument{2023, {"cats", "cat", "dog"}, {}}, map) ==
        LemmaSet{"cat", "dog"});
  CHECK(extract_exam_vocab(YearDocument{2023, {}, {}}, map).empty());
}

TEST_CASE("prediction metrics reproduce the comparison rows") {
  auto [i1, a1] = sets(3208, 1120, 385);
  auto m = prediction_metrics(i1, a1);
  CHECK(m.true_positives == 385);
  CHECK(std::abs(100.0 * m.accuracy - 12.0) <= 0.05);
  CHECK(std::abs(100.0 * m.intersection - 34.4) <= 0.05);

  auto [i2, a2] = sets(4024, 1120, 337);
  m = prediction_metrics(i2, a2);
  CHECK(std::abs(100.0 * m.accuracy - 8.4) <= 0.05);
  CHECK(std::abs(100.0 * m.intersection - 30.1) <= 0.05);

  m = prediction_metrics({"a", "b", "c", "d"}, {"b", "c", "e"});
  CHECK(m.true_positives == 2);
  CHECK(m.accuracy == 0.5);
  CHECK(m.intersection == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(prediction_metrics({}, {"a"}), InputError);
  CHECK_THROWS_AS(prediction_metrics({"a"}, {}), InputError);
}

TEST_CASE("prediction metrics cross-check identity and relabeling") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    LemmaSet interest, actual, relabeled_i, relabeled_a;
    for (int k = 0; k < 60; ++k) {
      const std::string w = "w" + std::to_string(rng() % 80);
      (rng() % 2 ? interest : actual).insert(w);
    }
    if (interest.empty() || actual.empty()) continue;
    for (const auto& w : interest) relabeled_i.insert("z" + w + "q");
    for (const auto& w : actual) relabeled_a.insert("z" + w + "q");
    const auto m = prediction_metrics(interest, actual);
    const auto r = prediction_metrics(relabeled_i, relabeled_a);
    CHECK(m.true_positives == r.true_positives);
    CHECK(m.accuracy == r.accuracy);
    CHECK(m.intersection == r.intersection);
    CHECK(m.true_positives <= std::min(m.interest_count, m.actual_count));
    CHECK(m.accuracy * static_cast<double>(m.interest_count) ==
          doctest::Approx(static_cast<double>(m.true_positives)));
    CHECK(m.intersection * static_cast<double>(m.actual_count) ==
          doctest::Approx(static_cast<double>(m.true_positives)));
  }
}

TEST_CASE("segment analysis hand example") {
  const auto t = table({{"a", 95}, {"b", 95}, {"c", 55}, {"d", 5}});
  const auto segs = segment_analysis(t, {"a", "c"}, 10);
  REQUIRE(segs.size() == 10);
  CHECK(segs[9].lower == 90.0);
  CHECK(segs[9].upper == 100.0);
  CHECK(segs[9].words == 2);
  CHECK(segs[9].rate == 0.5);
  CHECK(segs[9].accumulated_rate == 0.5);
  CHECK(segs[5].words == 1);
  CHECK(segs[5].accumulated_rate == doctest::Approx(2.0 / 3.0));
  CHECK(segs[0].accumulated_rate == 0.5);
  CHECK(segs[7].empty);
  CHECK(segs[7].rate == 0.0);
  CHECK_FALSE(segs[0].empty);
}

TEST_CASE("segment analysis edge cases") {
  const auto all = table({{"a", 100}, {"b", 100}});
  const auto segs = segment_analysis(all, {"a", "b"}, 10);
  std::size_t populated = 0;
  for (const auto& s : segs) populated += s.empty ? 0 : 1;
  CHECK(populated == 1);
  CHECK(segs.back().rate == 1.0);
  CHECK(segs.back().accumulated_rate == 1.0);

  CHECK(segment_analysis(all, {}, 25).size() == 4);
  CHECK(segment_analysis(all, {}, 100).size() == 1);
  CHECK_THROWS_AS(segment_analysis(all, {}, 30), InputError);
  CHECK_THROWS_AS(segment_analysis(all, {}, 0), InputError);
}

TEST_CASE("segment and histogram sums and the global rate") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> score(0.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<std::string, double>> entries;
    LemmaSet actual;
    const std::size_t n = 1 + rng() % 60;
    std::size_t appeared = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string w = "w" + std::to_string(i);
      double s = rng() % 5 == 0 ? 0.0 : score(rng);
      if (i == 0) s = 100.0;
      entries.emplace_back(w, s);
      if (rng() % 3 == 0) {
        actual.insert(w);
        ++appeared;
      }
    }
    actual.insert("unscored");
    const auto t = table(entries);
    const auto segs = segment_analysis(t, actual, 10);
    std::size_t words = 0;
    for (const auto& s : segs) {
      words += s.words;
      CHECK(s.accumulated_rate >= 0.0);
      CHECK(s.accumulated_rate <= 1.0);
    }
    CHECK(words == n);
    CHECK(segs.front().cumulative_words == n);
    CHECK(segs.front().accumulated_rate ==
          doctest::Approx(static_cast<double>(appeared) / static_cast<double>(n)));

    for (double width : {10.0, 7.0, 33.0}) {
      std::size_t total = 0;
      for (const auto& b : score_histogram(t, width)) total += b.count;
      CHECK(total == n);
    }
  }
}

TEST_CASE("score histogram bins") {
  const auto bins = score_histogram(table({{"a", 0}, {"b", 0}, {"c", 5}, {"d", 95}}), 10.0);
  REQUIRE(bins.size() == 10);
  CHECK(bins[0].count == 3);
  CHECK(bins[9].count == 1);
  const auto top = score_histogram(table({{"a", 100}}), 10.0);
  CHECK(top[9].count == 1);
  for (const auto& b : score_histogram(AiScoreTable{}, 10.0)) CHECK(b.count == 0);
  CHECK_THROWS_AS(score_histogram(AiScoreTable{}, 0.0), InputError);
}

TEST_CASE("evaluate reports both denominators") {
  const auto t = table({{"a", 100}, {"b", 40}, {"c", 0}, {"d", 0}});
  const auto report = evaluate(t, {"a", "c", "x"}, 10);
  CHECK(report.all_scored.interest_count == 4);
  CHECK(report.all_scored.true_positives == 2);
  CHECK(report.zero_score_words == 2);
  REQUIRE(report.nonzero_scored.has_value());
  CHECK(report.nonzero_scored->interest_count == 2);
  CHECK(report.nonzero_scored->true_positives == 1);

  const auto j = to_json(report);
  CHECK(j.at("all_scored").at("true_positives") == 2);
  CHECK(j.at("segments").size() == 10);

  std::ostringstream flags;
  write_word_flags_csv(flags, t, {"a"});
  CHECK(flags.str().rfind("word,score,appeared\na,", 0) == 0);
}

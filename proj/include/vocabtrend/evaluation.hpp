#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vocabtrend/corpus.hpp"
#include "vocabtrend/forecast.hpp"
#include "vocabtrend/lexicon.hpp"

namespace vocabtrend {

using LemmaSet = std::set<std::string>;

/// Distinct lemmas of an exam.
LemmaSet extract_exam_vocab(const YearDocument& exam, const LemmaMap& map);

struct PredictionMetrics {
  std::size_t interest_count = 0;
  std::size_t actual_count = 0;
  std::size_t true_positives = 0;
  double accuracy = 0.0;      // true_positives / interest_count
  double intersection = 0.0;  // true_positives / actual_count
};

/// Throws InputError when either set is empty.
PredictionMetrics prediction_metrics(const LemmaSet& interest, const LemmaSet& actual);

struct Segment {
  double lower = 0.0;
  double upper = 0.0;  // exclusive except for the top segment
  std::size_t words = 0;
  std::size_t appeared = 0;
  double rate = 0.0;              // appeared / words, 0 when empty
  std::size_t cumulative_words = 0;
  std::size_t cumulative_appeared = 0;
  double accumulated_rate = 0.0;  // this segment and all above it
  bool empty = true;
};

/// Score buckets of `width` points, lowest first. `width` must divide 100.
std::vector<Segment> segment_analysis(const AiScoreTable& scores, const LemmaSet& actual,
                                      int width);

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

/// Half-open bins over [0, 100]; the last bin also holds 100.
std::vector<HistogramBin> score_histogram(const AiScoreTable& scores, double bin_width);

struct EvalReport {
  PredictionMetrics all_scored;      // every scored word is a word in interest
  std::optional<PredictionMetrics> nonzero_scored;  // only words with score > 0
  std::size_t zero_score_words = 0;
  std::vector<Segment> segments;
  int segment_width = 10;
};

EvalReport evaluate(const AiScoreTable& scores, const LemmaSet& actual, int segment_width);

nlohmann::json to_json(const EvalReport& report);

/// `word,score,appeared` for plotting.
void write_word_flags_csv(std::ostream& out, const AiScoreTable& scores,
                          const LemmaSet& actual);

void write_segments_csv(std::ostream& out, const std::vector<Segment>& segments);
void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins);

}  // namespace vocabtrend

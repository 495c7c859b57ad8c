#include "vocabtrend/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "vocabtrend/error.hpp"

namespace vocabtrend {
namespace {

std::size_t bucket(double score, double width, std::size_t count) {
  if (!(score > 0.0)) return 0;
  const auto idx = static_cast<std::size_t>(std::floor(score / width));
  return std::min(idx, count - 1);
}

}  // namespace

LemmaSet extract_exam_vocab(const YearDocument& exam, const LemmaMap& map) {
  LemmaSet vocab;
  for (const auto& token : exam.tokens) vocab.insert(map.lemmatize(token));
  return vocab;
}

PredictionMetrics prediction_metrics(const LemmaSet& interest, const LemmaSet& actual) {
  if (interest.empty()) throw InputError("set of words in interest is empty");
  if (actual.empty()) throw InputError("set of exam words is empty");
  PredictionMetrics m;
  m.interest_count = interest.size();
  m.actual_count = actual.size();
  // Both sets are ordered; walk them together.
  auto a = interest.begin();
  auto b = actual.begin();
  while (a != interest.end() && b != actual.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++m.true_positives;
      ++a;
      ++b;
    }
  }
  m.accuracy = static_cast<double>(m.true_positives) / static_cast<double>(m.interest_count);
  m.intersection = static_cast<double>(m.true_positives) / static_cast<double>(m.actual_count);
  return m;
}

std::vector<Segment> segment_analysis(const AiScoreTable& scores, const LemmaSet& actual,
                                      int width) {
  if (width <= 0 || width > 100 || 100 % width != 0) {
    throw InputError("segment width " + std::to_string(width) + " must divide 100");
  }
  const auto count = static_cast<std::size_t>(100 / width);
  std::vector<Segment> segments(count);
  for (std::size_t s = 0; s < count; ++s) {
    segments[s].lower = static_cast<double>(s) * width;
    segments[s].upper = static_cast<double>(s + 1) * width;
  }
  for (std::size_t w = 0; w < scores.size(); ++w) {
    auto& seg = segments[bucket(scores.score[w], width, count)];
    ++seg.words;
    if (actual.contains(scores.words[w])) ++seg.appeared;
  }

  std::size_t words_above = 0;
  std::size_t appeared_above = 0;
  for (std::size_t s = count; s-- > 0;) {
    auto& seg = segments[s];
    seg.empty = seg.words == 0;
    seg.rate = seg.empty ? 0.0 : static_cast<double>(seg.appeared) / static_cast<double>(seg.words);
    words_above += seg.words;
    appeared_above += seg.appeared;
    seg.cumulative_words = words_above;
    seg.cumulative_appeared = appeared_above;
    seg.accumulated_rate = words_above == 0 ? 0.0
                                            : static_cast<double>(appeared_above) /
                                                  static_cast<double>(words_above);
  }
  return segments;
}

std::vector<HistogramBin> score_histogram(const AiScoreTable& scores, double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw InputError("histogram bin width must be positive");
  }
  const auto count = static_cast<std::size_t>(std::ceil(100.0 / bin_width));
  std::vector<HistogramBin> bins(count);
  for (std::size_t i = 0; i < count; ++i) {
    bins[i].lower = static_cast<double>(i) * bin_width;
    bins[i].upper = std::min(100.0, static_cast<double>(i + 1) * bin_width);
  }
  for (double s : scores.score) ++bins[bucket(s, bin_width, count)].count;
  return bins;
}

EvalReport evaluate(const AiScoreTable& scores, const LemmaSet& actual, int segment_width) {
  EvalReport report;
  report.segment_width = segment_width;
  const LemmaSet interest(scores.words.begin(), scores.words.end());
  report.all_scored = prediction_metrics(interest, actual);

  LemmaSet nonzero;
  for (std::size_t w = 0; w < scores.size(); ++w) {
    if (scores.score[w] > 0.0) {
      nonzero.insert(scores.words[w]);
    } else {
      ++report.zero_score_words;
    }
  }
  if (!nonzero.empty()) report.nonzero_scored = prediction_metrics(nonzero, actual);
  report.segments = segment_analysis(scores, actual, segment_width);
  return report;
}

namespace {

nlohmann::json metrics_json(const PredictionMetrics& m) {
  return {
      {"interest_count", m.interest_count},
      {"actual_count", m.actual_count},
      {"true_positives", m.true_positives},
      {"accuracy", m.accuracy},
      {"accuracy_formula", "true_positives / interest_count"},
      {"intersection", m.intersection},
      {"intersection_formula", "true_positives / actual_count"},
  };
}

}  // namespace

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& s : report.segments) {
    segments.push_back({
        {"lower", s.lower},
        {"upper", s.upper},
        {"words", s.words},
        {"appeared", s.appeared},
        {"rate", s.rate},
        {"cumulative_words", s.cumulative_words},
        {"cumulative_appeared", s.cumulative_appeared},
        {"accumulated_rate", s.accumulated_rate},
        {"empty", s.empty},
    });
  }
  return {
      {"all_scored", metrics_json(report.all_scored)},
      {"nonzero_scored",
       report.nonzero_scored ? metrics_json(*report.nonzero_scored) : nlohmann::json(nullptr)},
      {"zero_score_words", report.zero_score_words},
      {"segment_width", report.segment_width},
      {"segments", std::move(segments)},
  };
}

void write_word_flags_csv(std::ostream& out, const AiScoreTable& scores,
                          const LemmaSet& actual) {
  out << "word,score,appeared\n";
  for (std::size_t w = 0; w < scores.size(); ++w) {
    out << scores.words[w] << ',' << fmt::format("{:.4f}", scores.score[w]) << ','
        << (actual.contains(scores.words[w]) ? 1 : 0) << '\n';
  }
}

void write_segments_csv(std::ostream& out, const std::vector<Segment>& segments) {
  out << "lower,upper,words,appeared,rate,accumulated_rate,empty\n";
  for (const auto& s : segments) {
    out << fmt::format("{:g},{:g},{},{},{:.6f},{:.6f},{}\n", s.lower, s.upper, s.words,
                       s.appeared, s.rate, s.accumulated_rate, s.empty ? 1 : 0);
  }
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins) {
  out << "lower,upper,count\n";
  for (const auto& b : bins) out << fmt::format("{:g},{:g},{}\n", b.lower, b.upper, b.count);
}

}  // namespace vocabtrend

#pragma once

#include <cstddef>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "vocabtrend/neuralnet.hpp"

namespace vocabtrend {

/// Everything a pipeline stage needs. Optional inputs fall back to the
/// built-in removal rules, an empty lemma map, no screening, and the
/// default ensemble.
struct RunConfig {
  std::filesystem::path corpus_dir;
  std::optional<std::filesystem::path> rules_file;
  std::optional<std::filesystem::path> lemma_file;
  std::optional<std::filesystem::path> screen_file;
  std::optional<std::filesystem::path> ensemble_file;
  std::optional<std::filesystem::path> exam_file;
  std::filesystem::path output_dir;
  std::size_t high_rank = 0;  // 0 keeps every screened word
  Hyperparams hyper;
  std::size_t jobs = 0;  // 0 means one per ensemble entry
  int segment_width = 10;
  double histogram_bin_width = 10.0;

  /// Sets one `key = value` pair. Relative paths resolve against `base`.
  void set(std::string_view key, std::string_view value,
           const std::filesystem::path& base = {});
};

/// Parses a flat `key = value` file; '#' starts a comment line. Relative
/// paths are taken relative to the file's directory.
RunConfig load_config(const std::filesystem::path& file);

/// Output file names inside `output_dir`.
namespace outputs {
inline constexpr std::string_view kFrequency = "frequency.csv";
inline constexpr std::string_view kHighRank = "high_rank.csv";
inline constexpr std::string_view kLowRank = "low_rank.csv";
inline constexpr std::string_view kCorrelation = "correlation.csv";
inline constexpr std::string_view kScores = "scores.csv";
inline constexpr std::string_view kLossTrace = "loss_trace.csv";
inline constexpr std::string_view kEvaluation = "evaluation.json";
inline constexpr std::string_view kEvaluationWords = "evaluation_words.csv";
inline constexpr std::string_view kHistogram = "histogram.csv";
inline constexpr std::string_view kSegments = "segments.csv";
std::string checkpoint_name(std::size_t window);
}  // namespace outputs

/// Corpus to frequency CSVs. Summary goes to `log`.
void cmd_ingest(const RunConfig& config, std::ostream& log);

/// Sentence-level correlation of the high-rank words.
void cmd_correlate(const RunConfig& config, std::ostream& log);

/// One model per ensemble entry, checkpoints, loss trace and scores.
void cmd_train_predict(const RunConfig& config, std::ostream& log);

/// Scores against an exam text: metrics JSON and per-word flags.
void cmd_evaluate(const RunConfig& config, const std::filesystem::path& exam,
                  std::ostream& log);

/// Histogram of scores, plus segments when an exam or evaluation is
/// available.
void cmd_report(const RunConfig& config, std::ostream& log);

/// Exit status for an exception escaping a command: 2 for input and
/// filesystem errors, 3 for numeric failures, 1 for anything else.
int exit_code_for(const std::exception& e);

}  // namespace vocabtrend

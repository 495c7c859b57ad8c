#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vocabtrend/lexicon.hpp"
#include "vocabtrend/neuralnet.hpp"

namespace vocabtrend {

/// Every (word, start year) input window of one length with the count of
/// the following year as target.
struct WindowSet {
  std::size_t window = 0;
  std::vector<std::size_t> word_index;
  std::vector<std::size_t> start;  // column of the first input year
  Eigen::MatrixXd inputs;          // samples x window
  std::vector<double> targets;

  std::size_t size() const { return targets.size(); }
};

/// Requires 1 <= window < number of years. Samples are ordered by word,
/// then by start year.
WindowSet build_windows(const FrequencyMatrix& m, std::size_t window);

struct EnsembleEntry {
  std::size_t window = 0;
  double weight = 0.0;
  friend bool operator==(const EnsembleEntry&, const EnsembleEntry&) = default;
};

struct EnsembleSpec {
  std::vector<EnsembleEntry> entries;

  /// Windows 3, 5, 7, 10, 13 weighted 0.5 down to 0.1.
  static EnsembleSpec defaults();
  /// Distinct positive windows, finite non-negative weights.
  void validate() const;
  /// Also requires every window to be shorter than `years`.
  void validate_for(std::size_t years) const;
};

/// `N<TAB>weight` per line; blank and '#' lines skipped.
EnsembleSpec load_ensemble_spec(const std::filesystem::path& file);

struct TrainResult {
  ModelParams params;
  AdamState adam;
  std::vector<double> epoch_loss;  // mean training loss per epoch
};

/// Seeded init, per-epoch shuffle, minibatch Adam on log-cosh loss.
/// Deterministic for a given seed. Throws NumericError naming the epoch and
/// batch if the loss stops being finite.
TrainResult train_model(const WindowSet& ws, const Hyperparams& hyper);

/// Last `window` years of every word through the model, negatives clamped
/// to zero.
std::vector<double> predict_next(const ModelParams& params, const FrequencyMatrix& m,
                                 std::size_t window);

struct AiScoreTable {
  std::vector<std::string> words;
  std::vector<std::size_t> windows;
  std::vector<std::vector<double>> per_window;  // [entry][word]
  std::vector<double> raw;
  std::vector<double> score;

  std::size_t size() const { return words.size(); }
};

/// Weighted sum of the per-window predictions, rescaled so the largest is
/// 100. All-zero sums give all-zero scores.
AiScoreTable ai_score(std::span<const std::string> words,
                      std::span<const std::vector<double>> per_window,
                      const EnsembleSpec& spec);

/// `word,pred_w<N>...,raw,score` with four decimals.
void write_score_csv(std::ostream& out, const AiScoreTable& table);
AiScoreTable read_score_csv(std::istream& in);

struct EnsembleRun {
  std::vector<TrainResult> models;  // one per spec entry, spec order
  AiScoreTable scores;
};

/// Trains every entry (up to `jobs` at a time) and merges the predictions.
/// Results do not depend on `jobs`.
EnsembleRun run_ensemble(const FrequencyMatrix& m, const EnsembleSpec& spec,
                         const Hyperparams& hyper, std::size_t jobs);

}  // namespace vocabtrend

#include "vocabtrend/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "text_util.hpp"
#include "vocabtrend/cooccurrence.hpp"
#include "vocabtrend/corpus.hpp"
#include "vocabtrend/error.hpp"
#include "vocabtrend/evaluation.hpp"
#include "vocabtrend/forecast.hpp"
#include "vocabtrend/lexicon.hpp"

namespace vocabtrend {
namespace fs = std::filesystem;

namespace {

template <typename T>
T parse_value(std::string_view key, std::string_view value) {
  T out{};
  if (!detail::parse_number(value, out)) {
    throw InputError("config key '" + std::string(key) + "': bad value '" +
                     std::string(value) + "'");
  }
  return out;
}

fs::path resolve(std::string_view value, const fs::path& base) {
  fs::path p{std::string(value)};
  return (p.is_relative() && !base.empty()) ? base / p : p;
}

void require_file(const std::optional<fs::path>& p, std::string_view key) {
  if (p && !fs::is_regular_file(*p)) {
    throw InputError(std::string(key) + " not found: " + p->string());
  }
}

void require_output_dir(const RunConfig& c) {
  if (c.output_dir.empty()) throw InputError("output_dir is not set");
  if (fs::exists(c.output_dir) && !fs::is_directory(c.output_dir)) {
    throw InputError("output_dir is not a directory: " + c.output_dir.string());
  }
}

void validate_numbers(const RunConfig& c) {
  c.hyper.validate();
  if (c.segment_width <= 0 || c.segment_width > 100 || 100 % c.segment_width != 0) {
    throw InputError("segment_width must divide 100");
  }
  if (!(c.histogram_bin_width > 0.0)) throw InputError("histogram_bin_width must be > 0");
}

void validate_ingest_inputs(const RunConfig& c) {
  if (c.corpus_dir.empty()) throw InputError("corpus_dir is not set");
  if (!fs::is_directory(c.corpus_dir)) {
    throw InputError("corpus directory not found: " + c.corpus_dir.string());
  }
  require_file(c.rules_file, "rules_file");
  require_file(c.lemma_file, "lemma_file");
  require_file(c.screen_file, "screen_file");
  require_output_dir(c);
  validate_numbers(c);
}

RemovalRuleSet rules_for(const RunConfig& c) {
  return c.rules_file ? load_rules(*c.rules_file) : RemovalRuleSet::defaults();
}

LemmaMap lemmas_for(const RunConfig& c) {
  return c.lemma_file ? load_lemma_map(*c.lemma_file) : LemmaMap{};
}

fs::path output(const RunConfig& c, std::string_view name) {
  return c.output_dir / fs::path(std::string(name));
}

fs::path require_output(const RunConfig& c, std::string_view name, std::string_view producer) {
  fs::path p = output(c, name);
  if (!fs::is_regular_file(p)) {
    throw InputError(p.string() + " not found; run '" + std::string(producer) + "' first");
  }
  return p;
}

void write_file(const fs::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InputError("cannot write " + file.string());
  out << content;
  if (!out) throw InputError("failed writing " + file.string());
}

AiScoreTable load_scores(const fs::path& file) {
  std::istringstream in(read_text_file(file));
  return read_score_csv(in);
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view raw, const fs::path& base) {
  const std::string_view value = detail::trim(raw);
  if (key == "corpus_dir") {
    corpus_dir = resolve(value, base);
  } else if (key == "rules_file") {
    rules_file = resolve(value, base);
  } else if (key == "lemma_file") {
    lemma_file = resolve(value, base);
  } else if (key == "screen_file") {
    screen_file = resolve(value, base);
  } else if (key == "ensemble_file") {
    ensemble_file = resolve(value, base);
  } else if (key == "exam_file") {
    exam_file = resolve(value, base);
  } else if (key == "output_dir") {
    output_dir = resolve(value, base);
  } else if (key == "high_rank") {
    high_rank = parse_value<std::size_t>(key, value);
  } else if (key == "hidden") {
    hyper.hidden = parse_value<std::size_t>(key, value);
  } else if (key == "dense1") {
    hyper.dense1 = parse_value<std::size_t>(key, value);
  } else if (key == "dense2") {
    hyper.dense2 = parse_value<std::size_t>(key, value);
  } else if (key == "dropout") {
    hyper.dropout = parse_value<double>(key, value);
  } else if (key == "learning_rate") {
    hyper.learning_rate = parse_value<double>(key, value);
  } else if (key == "beta1") {
    hyper.beta1 = parse_value<double>(key, value);
  } else if (key == "beta2") {
    hyper.beta2 = parse_value<double>(key, value);
  } else if (key == "epsilon") {
    hyper.epsilon = parse_value<double>(key, value);
  } else if (key == "epochs") {
    hyper.epochs = parse_value<std::size_t>(key, value);
  } else if (key == "batch_size") {
    hyper.batch_size = parse_value<std::size_t>(key, value);
  } else if (key == "seed") {
    hyper.seed = parse_value<std::uint64_t>(key, value);
  } else if (key == "jobs") {
    jobs = parse_value<std::size_t>(key, value);
  } else if (key == "segment_width") {
    segment_width = parse_value<int>(key, value);
  } else if (key == "histogram_bin_width") {
    histogram_bin_width = parse_value<double>(key, value);
  } else {
    throw InputError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig load_config(const fs::path& file) {
  std::istringstream in(read_text_file(file));
  RunConfig config;
  const fs::path base = file.parent_path();
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(file.string() + ":" + std::to_string(number) + ": expected key = value");
    }
    config.set(detail::trim(trimmed.substr(0, eq)), trimmed.substr(eq + 1), base);
  }
  return config;
}

std::string outputs::checkpoint_name(std::size_t window) {
  return "model_w" + std::to_string(window) + ".ckpt";
}

void cmd_ingest(const RunConfig& c, std::ostream& log) {
  validate_ingest_inputs(c);
  const RemovalRuleSet rules = rules_for(c);
  const LemmaMap lemmas = lemmas_for(c);
  const std::optional<ScreenList> screen =
      c.screen_file ? std::optional(load_screen_list(*c.screen_file)) : std::nullopt;

  const auto docs = load_corpus(c.corpus_dir, rules);
  const FrequencyMatrix full = build_frequency_matrix(docs, lemmas);
  const FrequencyMatrix screened = screen ? apply_screening(full, *screen) : full;
  const std::size_t k = c.high_rank == 0 ? screened.word_count() : c.high_rank;
  const RankSplit split = rank_split(screened, k);

  std::ostringstream frequency, high, low;
  write_frequency_csv(frequency, full);
  write_frequency_csv(high, split.high);
  write_frequency_csv(low, split.low);

  fs::create_directories(c.output_dir);
  write_file(output(c, outputs::kFrequency), frequency.str());
  write_file(output(c, outputs::kHighRank), high.str());
  write_file(output(c, outputs::kLowRank), low.str());

  log << "years: " << docs.size();
  if (!docs.empty()) log << " (" << docs.front().year << ".." << docs.back().year << ")";
  log << '\n';
  for (const auto& d : docs) {
    log << "  " << d.year << ": " << d.tokens.size() << " tokens, " << d.sentences.size()
        << " sentences\n";
  }
  log << "vocabulary: " << full.word_count() << " lemmas\n";
  log << "screened: " << screened.word_count() << " lemmas\n";
  log << "high rank: " << split.high.word_count() << ", low rank: " << split.low.word_count()
      << '\n';
}

void cmd_correlate(const RunConfig& c, std::ostream& log) {
  validate_ingest_inputs(c);
  const fs::path high_file = require_output(c, outputs::kHighRank, "ingest");
  const RemovalRuleSet rules = rules_for(c);
  const LemmaMap lemmas = lemmas_for(c);
  const FrequencyMatrix high = load_frequency_csv(high_file);

  std::vector<Sentence> sentences;
  for (auto& doc : load_corpus(c.corpus_dir, rules)) {
    for (auto& s : doc.sentences) sentences.push_back(std::move(s));
  }
  const CorrelationMatrix corr =
      correlation_matrix(occurrence_matrix(sentences, high.words(), lemmas));

  std::ostringstream csv;
  write_correlation_csv(csv, corr);
  write_file(output(c, outputs::kCorrelation), csv.str());

  std::size_t strong = 0;
  const std::size_t n = corr.words.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) strong += std::abs(corr.at(i, j)) >= 0.5;
  }
  log << "sentences: " << sentences.size() << ", words: " << n << '\n';
  log << "pairs with |r| >= 0.5: " << strong << " of " << n * (n - 1) / 2 << '\n';
}

void cmd_train_predict(const RunConfig& c, std::ostream& log) {
  require_output_dir(c);
  require_file(c.ensemble_file, "ensemble_file");
  validate_numbers(c);
  const fs::path high_file = require_output(c, outputs::kHighRank, "ingest");
  const EnsembleSpec spec =
      c.ensemble_file ? load_ensemble_spec(*c.ensemble_file) : EnsembleSpec::defaults();
  const FrequencyMatrix m = load_frequency_csv(high_file);
  if (m.empty()) throw InputError("no words to train on in " + high_file.string());
  spec.validate_for(m.year_count());

  const std::size_t jobs = c.jobs == 0 ? spec.entries.size() : c.jobs;
  const EnsembleRun run = run_ensemble(m, spec, c.hyper, jobs);

  std::ostringstream scores;
  write_score_csv(scores, run.scores);

  std::ostringstream trace;
  trace << "epoch";
  for (const auto& e : spec.entries) trace << ",loss_w" << e.window;
  trace << '\n';
  for (std::size_t epoch = 0; epoch < c.hyper.epochs; ++epoch) {
    trace << epoch + 1;
    for (const auto& model : run.models) trace << ',' << fmt::format("{:.10g}", model.epoch_loss[epoch]);
    trace << '\n';
  }

  for (std::size_t i = 0; i < spec.entries.size(); ++i) {
    save_checkpoint(output(c, outputs::checkpoint_name(spec.entries[i].window)),
                    Checkpoint{c.hyper, spec.entries[i].window, run.models[i].params,
                               run.models[i].adam});
  }
  write_file(output(c, outputs::kLossTrace), trace.str());
  write_file(output(c, outputs::kScores), scores.str());

  for (std::size_t i = 0; i < spec.entries.size(); ++i) {
    const auto& p = run.scores.per_window[i];
    double mean = 0.0;
    for (double v : p) mean += v;
    mean /= static_cast<double>(p.empty() ? 1 : p.size());
    const auto& losses = run.models[i].epoch_loss;
    log << fmt::format("N={:<3} weight={:.2f} mean prediction={:.4f} final loss={}\n",
                       spec.entries[i].window, spec.entries[i].weight, mean,
                       losses.empty() ? std::string("n/a") : fmt::format("{:.6f}", losses.back()));
  }
  std::size_t zeros = 0;
  for (double s : run.scores.score) zeros += s == 0.0;
  log << "scored words: " << run.scores.size() << ", zero scores: " << zeros << '\n';
}

void cmd_evaluate(const RunConfig& c, const fs::path& exam, std::ostream& log) {
  require_output_dir(c);
  require_file(c.rules_file, "rules_file");
  require_file(c.lemma_file, "lemma_file");
  validate_numbers(c);
  const fs::path score_file = require_output(c, outputs::kScores, "train");
  if (!fs::is_regular_file(exam)) throw InputError("exam file not found: " + exam.string());

  const AiScoreTable scores = load_scores(score_file);
  const YearDocument doc = make_document(0, read_text_file(exam), rules_for(c));
  const LemmaSet actual = extract_exam_vocab(doc, lemmas_for(c));
  if (actual.empty()) throw InputError("exam contains no words: " + exam.string());
  const EvalReport report = evaluate(scores, actual, c.segment_width);

  std::ostringstream words;
  write_word_flags_csv(words, scores, actual);
  write_file(output(c, outputs::kEvaluation), to_json(report).dump(2) + "\n");
  write_file(output(c, outputs::kEvaluationWords), words.str());

  const auto& m = report.all_scored;
  log << "exam tokens: " << doc.tokens.size() << ", distinct lemmas: " << m.actual_count << '\n';
  log << fmt::format("words in interest: {}, true positives: {}\n", m.interest_count,
                     m.true_positives);
  log << fmt::format("accuracy: {}/{} = {:.1f}%\n", m.true_positives, m.interest_count,
                     100.0 * m.accuracy);
  log << fmt::format("intersection: {}/{} = {:.1f}%\n", m.true_positives, m.actual_count,
                     100.0 * m.intersection);
  if (report.nonzero_scored) {
    const auto& nz = *report.nonzero_scored;
    log << fmt::format("excluding {} zero-score words: accuracy {}/{} = {:.1f}%\n",
                       report.zero_score_words, nz.true_positives, nz.interest_count,
                       100.0 * nz.accuracy);
  }
}

void cmd_report(const RunConfig& c, std::ostream& log) {
  require_output_dir(c);
  require_file(c.exam_file, "exam_file");
  require_file(c.rules_file, "rules_file");
  require_file(c.lemma_file, "lemma_file");
  validate_numbers(c);
  const AiScoreTable scores = load_scores(require_output(c, outputs::kScores, "train"));

  std::optional<LemmaSet> actual;
  if (c.exam_file) {
    const YearDocument doc = make_document(0, read_text_file(*c.exam_file), rules_for(c));
    actual = extract_exam_vocab(doc, lemmas_for(c));
  } else if (const fs::path flags = output(c, outputs::kEvaluationWords); fs::is_regular_file(flags)) {
    std::istringstream in(read_text_file(flags));
    std::string line;
    std::getline(in, line);
    actual.emplace();
    while (std::getline(in, line)) {
      const auto fields = detail::split(detail::trim(line), ',');
      if (fields.size() == 3 && fields[2] == "1") actual->emplace(fields[0]);
    }
  }

  std::ostringstream histogram;
  write_histogram_csv(histogram, score_histogram(scores, c.histogram_bin_width));
  std::ostringstream segments;
  if (actual) write_segments_csv(segments, segment_analysis(scores, *actual, c.segment_width));

  write_file(output(c, outputs::kHistogram), histogram.str());
  log << "wrote " << output(c, outputs::kHistogram).string() << '\n';
  if (actual) {
    write_file(output(c, outputs::kSegments), segments.str());
    log << "wrote " << output(c, outputs::kSegments).string() << '\n';
  } else {
    log << "no exam_file or evaluation; segments skipped\n";
  }
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericError*>(&e) != nullptr) return 3;
  if (dynamic_cast<const InputError*>(&e) != nullptr ||
      dynamic_cast<const fs::filesystem_error*>(&e) != nullptr) {
    return 2;
  }
  return 1;
}

}  // namespace vocabtrend

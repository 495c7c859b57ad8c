#include "vocabtrend/forecast.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "text_util.hpp"
#include "vocabtrend/error.hpp"

namespace vocabtrend {

WindowSet build_windows(const FrequencyMatrix& m, std::size_t window) {
  const std::size_t years = m.year_count();
  if (window == 0 || window >= years) {
    throw InputError("window size " + std::to_string(window) + " must lie in 1.." +
                     std::to_string(years == 0 ? 0 : years - 1));
  }
  const std::size_t per_word = years - window;
  const std::size_t total = m.word_count() * per_word;

  WindowSet ws;
  ws.window = window;
  ws.word_index.reserve(total);
  ws.start.reserve(total);
  ws.targets.reserve(total);
  ws.inputs.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(window));
  Eigen::Index sample = 0;
  for (std::size_t w = 0; w < m.word_count(); ++w) {
    const auto row = m.row(w);
    for (std::size_t t = 0; t < per_word; ++t, ++sample) {
      for (std::size_t k = 0; k < window; ++k) {
        ws.inputs(sample, static_cast<Eigen::Index>(k)) = static_cast<double>(row[t + k]);
      }
      ws.word_index.push_back(w);
      ws.start.push_back(t);
      ws.targets.push_back(static_cast<double>(row[t + window]));
    }
  }
  return ws;
}

EnsembleSpec EnsembleSpec::defaults() {
  return EnsembleSpec{{{3, 0.5}, {5, 0.4}, {7, 0.3}, {10, 0.2}, {13, 0.1}}};
}

void EnsembleSpec::validate() const {
  if (entries.empty()) throw InputError("ensemble spec has no entries");
  std::set<std::size_t> seen;
  for (const auto& e : entries) {
    if (e.window == 0) throw InputError("ensemble window sizes must be positive");
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw InputError("ensemble weight for N=" + std::to_string(e.window) +
                       " must be finite and >= 0");
    }
    if (!seen.insert(e.window).second) {
      throw InputError("duplicate ensemble window N=" + std::to_string(e.window));
    }
  }
}

void EnsembleSpec::validate_for(std::size_t years) const {
  validate();
  for (const auto& e : entries) {
    if (e.window >= years) {
      throw InputError("window size N=" + std::to_string(e.window) +
                       " needs more than the " + std::to_string(years) +
                       " available years");
    }
  }
}

EnsembleSpec load_ensemble_spec(const std::filesystem::path& file) {
  std::istringstream in(read_text_file(file));
  EnsembleSpec spec;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto fields = detail::split(trimmed, '\t');
    EnsembleEntry entry;
    if (fields.size() != 2 || !detail::parse_number(fields[0], entry.window) ||
        !detail::parse_number(fields[1], entry.weight)) {
      throw InputError(file.string() + ":" + std::to_string(number) +
                       ": expected 'N<TAB>weight'");
    }
    spec.entries.push_back(entry);
  }
  spec.validate();
  return spec;
}

TrainResult train_model(const WindowSet& ws, const Hyperparams& hyper) {
  hyper.validate();
  if (ws.size() == 0) throw InputError("cannot train on an empty window set");

  Rng rng(hyper.seed);
  TrainResult result{initialize_params(hyper, rng), {}, {}};
  result.adam = AdamState::zeros_like(result.params);
  result.epoch_loss.reserve(hyper.epochs);

  const std::size_t n = ws.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Eigen::MatrixXd batch;
  std::vector<double> target;

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

    double total = 0.0;
    for (std::size_t begin = 0, b = 0; begin < n; begin += hyper.batch_size, ++b) {
      const std::size_t end = std::min(n, begin + hyper.batch_size);
      const auto rows = static_cast<Eigen::Index>(end - begin);
      batch.resize(rows, ws.inputs.cols());
      target.resize(end - begin);
      for (std::size_t k = begin; k < end; ++k) {
        batch.row(static_cast<Eigen::Index>(k - begin)) =
            ws.inputs.row(static_cast<Eigen::Index>(order[k]));
        target[k - begin] = ws.targets[order[k]];
      }

      const ForwardCache cache = forward(result.params, batch, true, hyper.dropout, rng);
      const double loss = logcosh_loss(
          std::span<const double>(cache.predictions.data(), target.size()), target);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(b));
      }
      total += loss * static_cast<double>(end - begin);
      adam_step(result.params, backward(result.params, cache, target), result.adam, hyper);
    }
    result.epoch_loss.push_back(total / static_cast<double>(n));
  }
  return result;
}

std::vector<double> predict_next(const ModelParams& params, const FrequencyMatrix& m,
                                 std::size_t window) {
  if (window == 0 || window > m.year_count()) {
    throw InputError("window size " + std::to_string(window) + " exceeds the " +
                     std::to_string(m.year_count()) + " available years");
  }
  if (m.word_count() == 0) return {};
  const std::size_t first = m.year_count() - window;
  Eigen::MatrixXd batch(static_cast<Eigen::Index>(m.word_count()),
                        static_cast<Eigen::Index>(window));
  for (std::size_t w = 0; w < m.word_count(); ++w) {
    const auto row = m.row(w);
    for (std::size_t k = 0; k < window; ++k) {
      batch(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(k)) =
          static_cast<double>(row[first + k]);
    }
  }
  const Eigen::VectorXd raw = predict(params, batch);
  std::vector<double> out(m.word_count());
  for (std::size_t w = 0; w < out.size(); ++w) {
    out[w] = std::max(0.0, raw(static_cast<Eigen::Index>(w)));
  }
  return out;
}

AiScoreTable ai_score(std::span<const std::string> words,
                      std::span<const std::vector<double>> per_window,
                      const EnsembleSpec& spec) {
  spec.validate();
  if (per_window.size() != spec.entries.size()) {
    throw InputError("expected " + std::to_string(spec.entries.size()) +
                     " prediction vectors, got " + std::to_string(per_window.size()));
  }
  for (const auto& p : per_window) {
    if (p.size() != words.size()) {
      throw InputError("prediction vector length does not match the word list");
    }
  }

  AiScoreTable table;
  table.words.assign(words.begin(), words.end());
  table.per_window.assign(per_window.begin(), per_window.end());
  for (const auto& e : spec.entries) table.windows.push_back(e.window);
  table.raw.assign(words.size(), 0.0);
  for (std::size_t i = 0; i < spec.entries.size(); ++i) {
    for (std::size_t w = 0; w < words.size(); ++w) {
      table.raw[w] += spec.entries[i].weight * per_window[i][w];
    }
  }

  const double top = table.raw.empty()
                         ? 0.0
                         : *std::max_element(table.raw.begin(), table.raw.end());
  table.score.assign(words.size(), 0.0);
  if (top > 0.0) {
    for (std::size_t w = 0; w < words.size(); ++w) {
      table.score[w] = 100.0 * table.raw[w] / top;
    }
  }
  return table;
}

void write_score_csv(std::ostream& out, const AiScoreTable& table) {
  out << "word";
  for (auto n : table.windows) out << ",pred_w" << n;
  out << ",raw,score\n";
  for (std::size_t w = 0; w < table.size(); ++w) {
    out << table.words[w];
    for (const auto& p : table.per_window) out << ',' << fmt::format("{:.4f}", p[w]);
    out << ',' << fmt::format("{:.4f}", table.raw[w]) << ','
        << fmt::format("{:.4f}", table.score[w]) << '\n';
  }
}

AiScoreTable read_score_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("score CSV is empty");
  const auto header = detail::split(detail::trim(line), ',');
  if (header.size() < 3 || header.front() != "word" || header[header.size() - 2] != "raw" ||
      header.back() != "score") {
    throw InputError("score CSV header must be word,pred_w<N>...,raw,score");
  }
  AiScoreTable table;
  for (std::size_t i = 1; i + 2 < header.size(); ++i) {
    std::size_t n = 0;
    if (!header[i].starts_with("pred_w") ||
        !detail::parse_number(header[i].substr(6), n)) {
      throw InputError("bad score CSV column '" + std::string(header[i]) + "'");
    }
    table.windows.push_back(n);
  }
  table.per_window.resize(table.windows.size());
  for (std::size_t number = 2; std::getline(in, line); ++number) {
    const std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    const auto fields = detail::split(row, ',');
    if (fields.size() != header.size()) {
      throw InputError("score CSV line " + std::to_string(number) + ": wrong field count");
    }
    std::vector<double> values(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (!detail::parse_number(fields[i], values[i - 1]) || !std::isfinite(values[i - 1])) {
        throw InputError("score CSV line " + std::to_string(number) + ": bad number");
      }
    }
    table.words.emplace_back(fields[0]);
    for (std::size_t i = 0; i < table.windows.size(); ++i) {
      table.per_window[i].push_back(values[i]);
    }
    table.raw.push_back(values[values.size() - 2]);
    table.score.push_back(values.back());
  }
  return table;
}

EnsembleRun run_ensemble(const FrequencyMatrix& m, const EnsembleSpec& spec,
                         const Hyperparams& hyper, std::size_t jobs) {
  spec.validate_for(m.year_count());
  hyper.validate();
  const std::size_t count = spec.entries.size();
  std::vector<TrainResult> models(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        models[i] = train_model(build_windows(m, spec.entries[i].window), hyper);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, count);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<std::vector<double>> predictions;
  predictions.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    predictions.push_back(predict_next(models[i].params, m, spec.entries[i].window));
  }
  EnsembleRun run{std::move(models), {}};
  run.scores = ai_score(m.words(), predictions, spec);
  return run;
}

}  // namespace vocabtrend

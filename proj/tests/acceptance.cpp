// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include <fmt/core.h>

#include "test_support.hpp"
#include "vocabtrend/cooccurrence.hpp"
#include "vocabtrend/corpus.hpp"
#include "vocabtrend/evaluation.hpp"
#include "vocabtrend/forecast.hpp"
#include "vocabtrend/lexicon.hpp"
#include "vocabtrend/neuralnet.hpp"
#include "vocabtrend/pipeline.hpp"
#include "vocabtrend/synthetic.hpp"

using namespace vocabtrend;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome gradient_correctness() {
  const auto start = Clock::now();
  double worst = 0.0;
  double weakest_control = std::numeric_limits<double>::infinity();
  const std::size_t windows[] = {2, 3, 5};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Hyperparams hyper;
    hyper.hidden = 2;
    hyper.dense1 = 3;
    hyper.dense2 = 2;
    Rng rng(seed);
    const auto params = initialize_params(hyper, rng);
    Eigen::MatrixXd batch(4, windows[seed % 3]);
    for (Eigen::Index i = 0; i < batch.size(); ++i) batch.data()[i] = rng.uniform(0.0, 3.0);
    std::vector<double> target(4);
    for (auto& t : target) t = rng.uniform(-2.0, 2.0);

    const auto cache = forward(params, batch, false, 0.0, rng);
    auto analytic = backward(params, cache, target);
    const auto numeric = numerical_gradient(params, batch, target, 1e-5);
    worst = std::max(worst, max_relative_error(analytic, numeric));

    // Fault injection: flip the sign of the largest gradient entry.
    auto g = analytic.values();
    const auto big = std::max_element(g.begin(), g.end(),
                                      [](double a, double b) { return std::abs(a) < std::abs(b); });
    *big = -*big;
    weakest_control = std::min(weakest_control, max_relative_error(analytic, numeric));
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-4 && weakest_control > 1e-2 && elapsed < 30.0,
          fmt::format("max rel err {:.3g} over 100 seeds, weakest fault control {:.3g}, {:.2f}s",
                      worst, weakest_control, elapsed)};
}

Outcome loss_identities() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> value(-50.0, 50.0);
  std::uniform_real_distribution<double> tiny(-1e-3, 1e-3);
  bool zero = true, symmetric = true, nonneg = true;
  double worst_quadratic = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x(1 + trial % 7), y(x.size());
    for (auto& v : x) v = value(rng);
    for (auto& v : y) v = value(rng);
    zero = zero && logcosh_loss(x, x) == 0.0;
    symmetric = symmetric && logcosh_loss(x, y) == logcosh_loss(y, x);
    nonneg = nonneg && logcosh_loss(x, y) >= 0.0;

    double d = tiny(rng);
    if (d == 0.0) d = 1e-3;
    const std::vector<double> p{d}, t{0.0};
    const double q = d * d / 2.0;
    worst_quadratic = std::max(worst_quadratic, std::abs(logcosh_loss(p, t) - q) / q);
  }
  const double asym = logcosh_loss(std::vector<double>{1000.0}, std::vector<double>{0.0});
  const double asym_err = std::abs(asym - (1000.0 - std::log(2.0)));
  return {zero && symmetric && nonneg && worst_quadratic <= 1e-5 && std::isfinite(asym) &&
              asym_err <= 1e-9,
          fmt::format("zero {}, symmetric {}, quadratic rel err {:.3g}, asymptote err {:.3g}",
                      zero, symmetric, worst_quadratic, asym_err)};
}

std::pair<LemmaSet, LemmaSet> overlap_sets(std::size_t interest, std::size_t actual, std::size_t tp) {
  LemmaSet i, a;
  for (std::size_t k = 0; k < tp; ++k) {
    i.insert(fmt::format("shared{}", k));
    a.insert(fmt::format("shared{}", k));
  }
  for (std::size_t k = tp; k < interest; ++k) i.insert(fmt::format("predicted{}", k));
  for (std::size_t k = tp; k < actual; ++k) a.insert(fmt::format("exam{}", k));
  return {i, a};
}

Outcome table_arithmetic() {
  struct Row {
    std::size_t interest, tp;
    double accuracy, intersection;
  };
  const Row rows[] = {{3208, 385, 12.0, 34.4}, {4024, 337, 8.4, 30.1}};
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    const auto [i, a] = overlap_sets(r.interest, 1120, r.tp);
    const auto m = prediction_metrics(i, a);
    const double acc = 100.0 * m.accuracy;
    const double inter = 100.0 * m.intersection;
    ok = ok && m.true_positives == r.tp && std::abs(acc - r.accuracy) <= 0.05 &&
         std::abs(inter - r.intersection) <= 0.05;
    detail += fmt::format("{}/{}: {:.2f}% / {:.2f}%; ", r.tp, r.interest, acc, inter);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome vocabulary_diff() {
  std::vector<std::string> kcsat, mock;
  for (int k = 0; k < 4689; ++k) {
    kcsat.push_back(fmt::format("both{:05}", k));
    mock.push_back(fmt::format("both{:05}", k));
  }
  for (int k = 0; k < 1886; ++k) kcsat.push_back(fmt::format("kcsat{:05}", k));
  for (int k = 0; k < 2262; ++k) mock.push_back(fmt::format("mock{:05}", k));
  std::mt19937_64 rng(4);
  std::shuffle(kcsat.begin(), kcsat.end(), rng);
  std::shuffle(mock.begin(), mock.end(), rng);
  const auto d = diff_vocabularies(kcsat, mock);
  const bool ok = d.only_a.size() == 1886 && d.only_b.size() == 2262 && d.both.size() == 4689 &&
                  d.only_a.size() + d.both.size() == 6575 &&
                  d.only_b.size() + d.both.size() == 6951;
  return {ok, fmt::format("{} + {} = {}, {} + {} = {}", d.only_a.size(), d.both.size(),
                          d.only_a.size() + d.both.size(), d.only_b.size(), d.both.size(),
                          d.only_b.size() + d.both.size())};
}

Outcome window_count_law() {
  std::mt19937_64 rng(5);
  std::size_t checked = 0;
  bool ok = true;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t years = 5 + rng() % 26;
    const std::size_t words = 10 + rng() % 191;
    std::vector<std::string> names(words);
    for (std::size_t i = 0; i < words; ++i) names[i] = fmt::format("w{:04}", i);
    std::vector<int> ys(years);
    std::iota(ys.begin(), ys.end(), 2000);
    std::vector<FrequencyMatrix::Count> counts(words * years);
    for (auto& c : counts) c = static_cast<FrequencyMatrix::Count>(rng() % 20);
    const FrequencyMatrix m(names, ys, counts);
    for (std::size_t n = 1; n < years; ++n) {
      const auto ws = build_windows(m, n);
      ok = ok && ws.size() == words * (years - n) &&
           static_cast<std::size_t>(ws.inputs.rows()) == ws.size();
      ++checked;
    }
  }
  return {ok, fmt::format("{} (matrix, N) pairs", checked)};
}

struct Fixture {
  testing::TempDir dir{"acceptance"};
  SyntheticCorpus corpus = make_synthetic_corpus(SyntheticOptions{});
  RunConfig config;
  Fixture() {
    write_synthetic_corpus(corpus, dir.path());
    config = load_config(dir / "run.conf");
  }
};

AiScoreTable load_scores(const fs::path& file) {
  std::istringstream in(testing::read_file(file));
  return read_score_csv(in);
}

double mean_score(const AiScoreTable& t, const std::vector<std::string>& words) {
  double sum = 0.0;
  for (const auto& w : words) {
    const auto it = std::find(t.words.begin(), t.words.end(), w);
    sum += it == t.words.end() ? 0.0 : t.score[static_cast<std::size_t>(it - t.words.begin())];
  }
  return sum / static_cast<double>(words.size());
}

Outcome end_to_end(Fixture& fx) {
  const auto start = Clock::now();
  std::ostringstream log;
  cmd_ingest(fx.config, log);
  cmd_train_predict(fx.config, log);
  const auto scores = load_scores(fx.config.output_dir / outputs::kScores);

  const double persistent = mean_score(scores, fx.corpus.persistent);
  const double extinct = mean_score(scores, fx.corpus.extinct);

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores.score[a] > scores.score[b]; });
  std::size_t in_top = 0;
  for (std::size_t r = 0; r < std::min<std::size_t>(15, order.size()); ++r) {
    const auto& w = scores.words[order[r]];
    in_top += std::count(fx.corpus.persistent.begin(), fx.corpus.persistent.end(), w);
  }

  const auto exam = make_document(fx.corpus.exam_year, fx.corpus.exam_text, RemovalRuleSet::defaults());
  const auto actual = extract_exam_vocab(exam, load_lemma_map(*fx.config.lemma_file));
  const auto segments = segment_analysis(scores, actual, 10);
  const double top_rate = segments.back().rate;
  const double all_rate = segments.front().accumulated_rate;

  const double elapsed = seconds_since(start);
  return {persistent > extinct && in_top >= 8 && !segments.back().empty && top_rate >= all_rate &&
              elapsed < 300.0,
          fmt::format("persistent mean {:.2f} vs extinct mean {:.2f}, {}/10 persistent in top 15, "
                      "top decile rate {:.2f} vs all-words {:.2f}, {:.1f}s",
                      persistent, extinct, in_top, top_rate, all_rate, elapsed)};
}

Outcome determinism(Fixture& fx) {
  const fs::path out = fx.config.output_dir;
  const auto snapshot = [&] {
    std::vector<std::string> files;
    for (auto name : {outputs::kFrequency, outputs::kHighRank, outputs::kLowRank,
                      outputs::kScores, outputs::kLossTrace}) {
      files.push_back(testing::read_file(out / std::string(name)));
    }
    return files;
  };
  const auto first = snapshot();

  std::ostringstream log;
  cmd_ingest(fx.config, log);
  cmd_train_predict(fx.config, log);
  const bool csv_same = snapshot() == first;

  bool ckpt_same = true;
  std::size_t checkpoints = 0;
  for (const auto& e : load_ensemble_spec(*fx.config.ensemble_file).entries) {
    const auto file = out / outputs::checkpoint_name(e.window);
    const auto ckpt = load_checkpoint(file);
    const auto copy = fx.dir / "copy.ckpt";
    save_checkpoint(copy, ckpt);
    ckpt_same = ckpt_same && load_checkpoint(copy) == ckpt &&
                testing::read_file(copy) == testing::read_file(file);
    ++checkpoints;
  }
  return {csv_same && ckpt_same && checkpoints > 0,
          fmt::format("rerun CSVs identical {}, {} checkpoints round-trip {}", csv_same,
                      checkpoints, ckpt_same)};
}

Outcome ensemble_invariances(const Fixture& fx) {
  const auto trained = load_scores(fx.config.output_dir / outputs::kScores);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pred(0.0, 20.0);
  const auto spec = EnsembleSpec::defaults();
  auto scaled = spec;
  for (auto& e : scaled.entries) e.weight *= 3.0;

  bool ranking = true;
  double worst_scale = 0.0;
  auto check = [&](const std::vector<std::string>& words,
                   const std::vector<std::vector<double>>& preds, const EnsembleSpec& base,
                   const EnsembleSpec& tripled) {
    const auto a = ai_score(words, preds, base);
    const auto b = ai_score(words, preds, tripled);
    for (std::size_t i = 0; i < a.size(); ++i) {
      worst_scale = std::max(worst_scale, std::abs(a.score[i] - b.score[i]));
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (a.raw[i] < a.raw[j] && a.score[i] > a.score[j]) ranking = false;
        if (a.raw[i] == a.raw[j] && a.score[i] != a.score[j]) ranking = false;
      }
    }
  };
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<std::string> words(n);
    for (std::size_t i = 0; i < n; ++i) words[i] = fmt::format("w{}", i);
    std::vector<std::vector<double>> preds(spec.entries.size(), std::vector<double>(n));
    for (auto& v : preds) for (auto& x : v) x = rng() % 4 == 0 ? 0.0 : pred(rng);
    check(words, preds, spec, scaled);
  }

  // The trained fixture ensemble, with its own (filtered) weights.
  EnsembleSpec fixture_spec = load_ensemble_spec(*fx.config.ensemble_file);
  EnsembleSpec fixture_scaled = fixture_spec;
  for (auto& e : fixture_scaled.entries) e.weight *= 3.0;
  check(trained.words, trained.per_window, fixture_spec, fixture_scaled);

  return {ranking && worst_scale <= 1e-12,
          fmt::format("ranking preserved {}, max score change under x3 weights {:.3g}", ranking,
                      worst_scale)};
}

Outcome correlation_properties() {
  std::mt19937_64 rng(9);
  bool symmetric = true, in_range = true, permutation = true, zero_variance = true;
  for (int trial = 0; trial < 200; ++trial) {
    OccurrenceMatrix o;
    const std::size_t words = 2 + rng() % 12;
    o.sentences = 2 + rng() % 40;
    for (std::size_t w = 0; w < words; ++w) o.words.push_back(fmt::format("w{:02}", w));
    o.cells.resize(words * o.sentences);
    const double density = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    for (auto& c : o.cells) c = static_cast<double>(rng() % 1000) / 1000.0 < density;
    const std::size_t constant_row = rng() % words;
    const std::uint8_t constant_value = rng() % 2;
    std::fill_n(o.cells.begin() + static_cast<std::ptrdiff_t>(constant_row * o.sentences),
                o.sentences, constant_value);

    const auto c = correlation_matrix(o);
    std::vector<std::size_t> perm(o.sentences);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    OccurrenceMatrix shuffled = o;
    for (std::size_t w = 0; w < words; ++w) {
      for (std::size_t s = 0; s < o.sentences; ++s) {
        shuffled.cells[w * o.sentences + s] = o.at(w, perm[s]);
      }
    }
    const auto p = correlation_matrix(shuffled);

    for (std::size_t i = 0; i < words; ++i) {
      for (std::size_t j = 0; j < words; ++j) {
        symmetric = symmetric && c.at(i, j) == c.at(j, i);
        in_range = in_range && c.at(i, j) >= -1.0 - 1e-12 && c.at(i, j) <= 1.0 + 1e-12;
        permutation = permutation && c.at(i, j) == p.at(i, j);
      }
      zero_variance = zero_variance && c.at(constant_row, i) == 0.0 && c.at(i, constant_row) == 0.0;
    }
  }
  return {symmetric && in_range && permutation && zero_variance,
          fmt::format("200 cases: symmetric {}, in range {}, permutation invariant {}, "
                      "zero-variance rows 0 {}",
                      symmetric, in_range, permutation, zero_variance)};
}

Outcome cleaning_properties() {
  std::mt19937_64 rng(10);
  const auto rules = RemovalRuleSet::defaults();
  std::size_t idempotent = 0, pure = 0, tokens = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto once = clean_text(testing::random_unicode(rng, 128), rules);
    idempotent += clean_text(once, rules) == once;
    bool letters = true;
    for (const auto& t : tokenize(once)) {
      ++tokens;
      letters = letters && !t.empty() &&
                std::all_of(t.begin(), t.end(), [](char ch) { return ch >= 'a' && ch <= 'z'; });
    }
    pure += letters;
  }
  return {idempotent == 1000 && pure == 1000,
          fmt::format("{}/1000 idempotent, {}/1000 letter-only ({} tokens)", idempotent, pure,
                      tokens)};
}

}  // namespace

int main() {
  int failures = 0;
  const auto run = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failures += o.pass ? 0 : 1;
    fmt::print("{} [{:>2}] {}: {}\n", o.pass ? "PASS" : "FAIL", id, name, o.detail);
    std::fflush(stdout);
  };

  Fixture fx;
  run(1, "gradient correctness", gradient_correctness);
  run(2, "loss identities", loss_identities);
  run(3, "comparison-row arithmetic", table_arithmetic);
  run(4, "vocabulary diff consistency", vocabulary_diff);
  run(5, "windowing count law", window_count_law);
  run(6, "end-to-end synthetic forecast", [&] { return end_to_end(fx); });
  run(7, "determinism", [&] { return determinism(fx); });
  run(8, "ensemble invariances", [&] { return ensemble_invariances(fx); });
  run(9, "correlation properties", correlation_properties);
  run(10, "cleaning idempotence and token purity", cleaning_properties);
  fmt::print("{} of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}

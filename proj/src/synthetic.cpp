#include "vocabtrend/synthetic.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "vocabtrend/error.hpp"
#include "vocabtrend/neuralnet.hpp"

namespace vocabtrend {
namespace {

constexpr std::string_view kConsonants = "bdfgklmnprtvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::string_view kTerminators = "..!?";

std::string make_word(Rng& rng) {
  std::string w;
  for (int i = 0; i < 5; ++i) {
    const auto& pool = (i % 2 == 0) ? kConsonants : kVowels;
    w.push_back(pool[rng.index(pool.size())]);
  }
  return w;
}

int draw_count(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.index(static_cast<std::size_t>(hi - lo + 1)));
}

std::string render_year(int year, const std::vector<std::pair<std::string, int>>& counts,
                        Rng& rng) {
  std::vector<std::string> tokens;
  for (const auto& [word, n] : counts) {
    for (int i = 0; i < n; ++i) tokens.push_back(rng.uniform() < 0.2 ? word + "s" : word);
  }
  const std::size_t fillers = tokens.size() / 4 + 1;
  for (std::size_t i = 0; i < fillers; ++i) tokens.emplace_back(i % 2 ? "and" : "the");
  for (std::size_t i = tokens.size(); i > 1; --i) std::swap(tokens[i - 1], tokens[rng.index(i)]);

  std::ostringstream out;
  // Header lines of the kind found in converted exam files.
  out << year << "학년도 대학수학능력시험 영어 영역\n";
  std::size_t i = 0;
  int question = 18;
  while (i < tokens.size()) {
    const std::size_t len = 6 + rng.index(5);
    out << question++ << ". ";
    for (std::size_t k = 0; k < len && i < tokens.size(); ++k, ++i) {
      std::string t = tokens[i];
      if (k == 0) t[0] = static_cast<char>(t[0] - 'a' + 'A');
      out << (k ? " " : "") << t;
    }
    out << kTerminators[rng.index(kTerminators.size())];
    out << (rng.uniform() < 0.3 ? " (A), (B), (C),\n" : "\n");
  }
  return out.str();
}

}  // namespace

std::vector<std::string> SyntheticCorpus::all_words() const {
  std::vector<std::string> all = persistent;
  all.insert(all.end(), extinct.begin(), extinct.end());
  all.insert(all.end(), noise.begin(), noise.end());
  return all;
}

SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& o) {
  if (o.years == 0 || o.extinct_years > o.years || o.min_count < 1 ||
      o.max_count < o.min_count || o.noise_max < 0) {
    throw InputError("invalid synthetic corpus options");
  }
  Rng rng(o.seed);
  SyntheticCorpus c;
  std::set<std::string> used{"the", "and"};
  auto fresh = [&] {
    std::string w;
    do {
      w = make_word(rng);
    } while (!used.insert(w).second);
    return w;
  };
  for (std::size_t i = 0; i < o.persistent; ++i) c.persistent.push_back(fresh());
  for (std::size_t i = 0; i < o.extinct; ++i) c.extinct.push_back(fresh());
  for (std::size_t i = 0; i < o.noise; ++i) c.noise.push_back(fresh());
  c.screen = c.all_words();
  for (const auto& w : c.screen) c.lemma_pairs.emplace_back(w + "s", w);

  auto counts_for = [&](std::size_t year_index) {
    std::vector<std::pair<std::string, int>> counts;
    for (const auto& w : c.persistent) counts.emplace_back(w, draw_count(rng, o.min_count, o.max_count));
    for (const auto& w : c.extinct) {
      counts.emplace_back(w, year_index < o.extinct_years
                                 ? draw_count(rng, o.min_count, o.max_count)
                                 : 0);
    }
    for (const auto& w : c.noise) counts.emplace_back(w, draw_count(rng, 0, o.noise_max));
    return counts;
  };

  for (std::size_t y = 0; y < o.years; ++y) {
    const int year = o.first_year + static_cast<int>(y);
    c.texts.emplace_back(year, render_year(year, counts_for(y), rng));
  }
  c.exam_year = o.first_year + static_cast<int>(o.years);
  c.exam_text = render_year(c.exam_year, counts_for(o.years), rng);
  return c;
}

void write_synthetic_corpus(const SyntheticCorpus& c, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "corpus");
  auto write = [](const fs::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw InputError("cannot write " + file.string());
    out << content;
  };
  for (const auto& [year, text] : c.texts) {
    write(dir / "corpus" / (std::to_string(year) + ".txt"), text);
  }
  write(dir / "exam.txt", c.exam_text);

  std::string lemmas;
  for (const auto& [surface, lemma] : c.lemma_pairs) lemmas += surface + "\t" + lemma + "\n";
  write(dir / "lemmas.tsv", lemmas);

  std::string screen;
  for (const auto& w : c.screen) screen += w + "\n";
  write(dir / "screen.txt", screen);

  write(dir / "rules.txt", "(A),\n(B),\n(C),\n(D),\n(E),\n\\n.\\n\n_____\n");

  // Windows must stay below the number of corpus years.
  std::string ensemble;
  const std::size_t years = c.texts.size();
  for (const auto& [n, w] : std::vector<std::pair<std::size_t, const char*>>{
           {3, "0.5"}, {5, "0.4"}, {7, "0.3"}, {10, "0.2"}, {13, "0.1"}}) {
    if (n < years) ensemble += std::to_string(n) + "\t" + w + "\n";
  }
  write(dir / "ensemble.tsv", ensemble);

  write(dir / "run.conf",
        "# Synthetic exam series\n"
        "corpus_dir = corpus\n"
        "rules_file = rules.txt\n"
        "lemma_file = lemmas.tsv\n"
        "screen_file = screen.txt\n"
        "ensemble_file = ensemble.tsv\n"
        "output_dir = out\n"
        "exam_file = exam.txt\n"
        "seed = 7\n");
}

}  // namespace vocabtrend

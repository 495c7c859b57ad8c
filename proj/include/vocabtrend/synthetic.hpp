#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace vocabtrend {

/// Shape of the generated exam series. Persistent words occur every year
/// with counts in [min_count, max_count]; extinct words only in the first
/// `extinct_years` years with the same counts; noise words get a uniform
/// count in [0, noise_max] each year.
struct SyntheticOptions {
  std::size_t years = 12;
  int first_year = 2011;
  std::uint64_t seed = 2022;
  std::size_t persistent = 10;
  std::size_t extinct = 10;
  std::size_t noise = 30;
  std::size_t extinct_years = 4;
  int min_count = 8;
  int max_count = 15;
  int noise_max = 5;
};

struct SyntheticCorpus {
  std::vector<std::string> persistent;
  std::vector<std::string> extinct;
  std::vector<std::string> noise;
  std::vector<std::pair<int, std::string>> texts;  // raw text per year
  int exam_year = 0;
  std::string exam_text;  // the year after the last corpus year
  std::vector<std::pair<std::string, std::string>> lemma_pairs;  // plural -> word
  std::vector<std::string> screen;  // every generated word, no fillers

  std::vector<std::string> all_words() const;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& options);

/// Writes `corpus/<year>.txt`, `exam.txt`, `lemmas.tsv`, `screen.txt`,
/// `rules.txt`, `ensemble.tsv` and `run.conf` under `dir`.
void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

}  // namespace vocabtrend

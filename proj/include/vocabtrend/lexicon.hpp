#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vocabtrend/corpus.hpp"

namespace vocabtrend {

/// Surface form to dictionary form. Every target is a fixed point: chains
/// are collapsed when the map is built.
class LemmaMap {
 public:
  LemmaMap() = default;

  /// Collapses chains; throws InputError on a cycle.
  explicit LemmaMap(std::unordered_map<std::string, std::string> entries);

  /// Identity for surfaces without an entry.
  const std::string& lemmatize(const std::string& token) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::string> entries_;
};

/// `surface<TAB>lemma` per line. Blank lines and lines starting with '#'
/// are skipped.
LemmaMap load_lemma_map(const std::filesystem::path& file);

inline const std::string& lemmatize(const std::string& token,
                                    const LemmaMap& map) {
  return map.lemmatize(token);
}

/// Words x years count table. Words are kept in lexicographic order and
/// years ascending.
class FrequencyMatrix {
 public:
  using Count = std::int64_t;

  FrequencyMatrix() = default;
  /// `counts` is row-major, one row per word. Validates the shape, sort
  /// order, uniqueness and non-negativity.
  FrequencyMatrix(std::vector<std::string> words, std::vector<int> years,
                  std::vector<Count> counts);

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<int>& years() const { return years_; }
  std::size_t word_count() const { return words_.size(); }
  std::size_t year_count() const { return years_.size(); }
  bool empty() const { return words_.empty(); }

  Count at(std::size_t word, std::size_t year) const {
    return counts_[word * years_.size() + year];
  }
  std::span<const Count> row(std::size_t word) const {
    return {counts_.data() + word * years_.size(), years_.size()};
  }
  Count row_total(std::size_t word) const;

  /// Rows for `keep` (indices ascending) in the original order.
  FrequencyMatrix select_rows(std::span<const std::size_t> keep) const;

  friend bool operator==(const FrequencyMatrix&,
                         const FrequencyMatrix&) = default;

 private:
  std::vector<std::string> words_;
  std::vector<int> years_;
  std::vector<Count> counts_;
};

/// Lemmas kept by the expert screen.
struct ScreenList {
  std::set<std::string> kept;
};

/// One lemma per line; throws InputError when empty or when an entry is
/// not a lowercase letter string.
ScreenList load_screen_list(const std::filesystem::path& file);

/// counts[w][y] = tokens of year y whose lemma is w.
FrequencyMatrix build_frequency_matrix(std::span<const YearDocument> docs,
                                       const LemmaMap& map);

FrequencyMatrix apply_screening(const FrequencyMatrix& m, const ScreenList& s);

struct RankSplit {
  FrequencyMatrix high;
  FrequencyMatrix low;
};

/// The `k` words with the largest total count go to `high`; ties prefer the
/// lexicographically smaller word.
RankSplit rank_split(const FrequencyMatrix& m, std::size_t k);

struct VocabularyDiff {
  std::set<std::string> only_a;
  std::set<std::string> only_b;
  std::set<std::string> both;
};

VocabularyDiff diff_vocabularies(std::span<const std::string> a,
                                 std::span<const std::string> b);
VocabularyDiff diff_vocabularies(const FrequencyMatrix& a,
                                 const FrequencyMatrix& b);

/// CSV with header `word,<year>,...` and integer cells.
void write_frequency_csv(std::ostream& out, const FrequencyMatrix& m);
FrequencyMatrix read_frequency_csv(std::istream& in);
void save_frequency_csv(const std::filesystem::path& file,
                        const FrequencyMatrix& m);
FrequencyMatrix load_frequency_csv(const std::filesystem::path& file);

/// True for nonempty strings of lowercase ASCII letters.
bool is_lemma_string(std::string_view s);

}  // namespace vocabtrend

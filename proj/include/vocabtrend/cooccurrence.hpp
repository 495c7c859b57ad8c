#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vocabtrend/corpus.hpp"
#include "vocabtrend/lexicon.hpp"

namespace vocabtrend {

/// Binary word-in-sentence incidence, one row per word.
struct OccurrenceMatrix {
  std::vector<std::string> words;
  std::size_t sentences = 0;
  std::vector<std::uint8_t> cells;  // row-major, words x sentences

  std::uint8_t at(std::size_t word, std::size_t sentence) const {
    return cells[word * sentences + sentence];
  }
};

/// Square, symmetric, row-major.
struct CorrelationMatrix {
  std::vector<std::string> words;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const {
    return values[i * words.size() + j];
  }
};

OccurrenceMatrix occurrence_matrix(std::span<const Sentence> sentences,
                                   std::span<const std::string> vocab,
                                   const LemmaMap& map);

/// Phi coefficient between every pair of rows. Pairs touching a constant
/// row are 0, diagonal included.
CorrelationMatrix correlation_matrix(const OccurrenceMatrix& o);

/// Word header row and column, six decimals.
void write_correlation_csv(std::ostream& out, const CorrelationMatrix& c);

}  // namespace vocabtrend

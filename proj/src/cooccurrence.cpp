#include "vocabtrend/cooccurrence.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include <fmt/format.h>

#include "vocabtrend/error.hpp"

namespace vocabtrend {

OccurrenceMatrix occurrence_matrix(std::span<const Sentence> sentences,
                                   std::span<const std::string> vocab,
                                   const LemmaMap& map) {
  if (vocab.empty()) throw InputError("occurrence matrix needs a vocabulary");
  if (sentences.empty()) throw InputError("occurrence matrix needs sentences");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vocab.size(); ++i) index.emplace(vocab[i], i);

  OccurrenceMatrix o;
  o.words.assign(vocab.begin(), vocab.end());
  o.sentences = sentences.size();
  o.cells.assign(vocab.size() * sentences.size(), 0);
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    for (const auto& token : sentences[s]) {
      const auto it = index.find(map.lemmatize(token));
      if (it != index.end()) o.cells[it->second * o.sentences + s] = 1;
    }
  }
  return o;
}

CorrelationMatrix correlation_matrix(const OccurrenceMatrix& o) {
  if (o.sentences < 2) throw InputError("correlation needs at least 2 sentences");
  const std::size_t w = o.words.size();
  const auto n = static_cast<std::int64_t>(o.sentences);

  std::vector<std::int64_t> sums(w, 0);
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t s = 0; s < o.sentences; ++s) sums[i] += o.at(i, s);
  }

  // Integer moments keep the result exactly symmetric and independent of
  // sentence order; only the final quotient rounds.
  CorrelationMatrix c{o.words, std::vector<double>(w * w, 0.0)};
  for (std::size_t i = 0; i < w; ++i) {
    const std::int64_t var_i = sums[i] * (n - sums[i]);
    if (var_i == 0) continue;
    c.values[i * w + i] = 1.0;
    for (std::size_t j = i + 1; j < w; ++j) {
      const std::int64_t var_j = sums[j] * (n - sums[j]);
      if (var_j == 0) continue;
      std::int64_t joint = 0;
      const std::uint8_t* a = o.cells.data() + i * o.sentences;
      const std::uint8_t* b = o.cells.data() + j * o.sentences;
      for (std::size_t s = 0; s < o.sentences; ++s) joint += a[s] & b[s];
      const std::int64_t cov = n * joint - sums[i] * sums[j];
      double r = static_cast<double>(cov) /
                 std::sqrt(static_cast<double>(var_i) * static_cast<double>(var_j));
      r = std::clamp(r, -1.0, 1.0);
      c.values[i * w + j] = r;
      c.values[j * w + i] = r;
    }
  }
  return c;
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& c) {
  out << "word";
  for (const auto& w : c.words) out << ',' << w;
  out << '\n';
  for (std::size_t i = 0; i < c.words.size(); ++i) {
    out << c.words[i];
    for (std::size_t j = 0; j < c.words.size(); ++j) {
      out << ',' << fmt::format("{:.6f}", c.at(i, j));
    }
    out << '\n';
  }
}

}  // namespace vocabtrend

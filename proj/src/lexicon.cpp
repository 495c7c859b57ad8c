#include "vocabtrend/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "text_util.hpp"
#include "vocabtrend/error.hpp"

namespace vocabtrend {

bool is_lemma_string(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

LemmaMap::LemmaMap(std::unordered_map<std::string, std::string> entries) {
  for (const auto& [surface, first] : entries) {
    std::string lemma = first;
    // A chain visits each surface at most once; a longer walk means a cycle.
    std::size_t steps = 0;
    for (auto it = entries.find(lemma); it != entries.end() && it->second != lemma;
         it = entries.find(lemma)) {
      lemma = it->second;
      if (++steps > entries.size()) {
        throw InputError("lemma map contains a cycle through '" + surface + "'");
      }
    }
    entries_.emplace(surface, std::move(lemma));
  }
}

const std::string& LemmaMap::lemmatize(const std::string& token) const {
  const auto it = entries_.find(token);
  return it == entries_.end() ? token : it->second;
}

LemmaMap load_lemma_map(const std::filesystem::path& file) {
  std::istringstream in(read_text_file(file));
  std::unordered_map<std::string, std::string> entries;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto fields = detail::split(trimmed, '\t');
    if (fields.size() != 2 || !is_lemma_string(detail::trim(fields[0])) ||
        !is_lemma_string(detail::trim(fields[1]))) {
      throw InputError(file.string() + ":" + std::to_string(number) +
                       ": expected 'surface<TAB>lemma' in lowercase letters");
    }
    std::string surface(detail::trim(fields[0]));
    std::string lemma(detail::trim(fields[1]));
    const auto [it, inserted] = entries.emplace(surface, lemma);
    if (!inserted && it->second != lemma) {
      throw InputError(file.string() + ":" + std::to_string(number) +
                       ": '" + surface + "' maps to both '" + it->second +
                       "' and '" + lemma + "'");
    }
  }
  return LemmaMap(std::move(entries));
}

FrequencyMatrix::FrequencyMatrix(std::vector<std::string> words,
                                 std::vector<int> years,
                                 std::vector<Count> counts)
    : words_(std::move(words)), years_(std::move(years)), counts_(std::move(counts)) {
  if (counts_.size() != words_.size() * years_.size()) {
    throw InputError("frequency matrix shape mismatch");
  }
  if (std::adjacent_find(words_.begin(), words_.end(),
                         std::greater_equal<>()) != words_.end()) {
    throw InputError("frequency matrix words must be unique and sorted");
  }
  if (std::adjacent_find(years_.begin(), years_.end(),
                         std::greater_equal<>()) != years_.end()) {
    throw InputError("frequency matrix years must be unique and ascending");
  }
  if (std::any_of(counts_.begin(), counts_.end(), [](Count c) { return c < 0; })) {
    throw InputError("frequency matrix counts must be non-negative");
  }
}

FrequencyMatrix::Count FrequencyMatrix::row_total(std::size_t word) const {
  const auto r = row(word);
  return std::accumulate(r.begin(), r.end(), Count{0});
}

FrequencyMatrix FrequencyMatrix::select_rows(std::span<const std::size_t> keep) const {
  std::vector<std::string> words;
  std::vector<Count> counts;
  words.reserve(keep.size());
  counts.reserve(keep.size() * years_.size());
  for (std::size_t i : keep) {
    words.push_back(words_.at(i));
    const auto r = row(i);
    counts.insert(counts.end(), r.begin(), r.end());
  }
  return FrequencyMatrix(std::move(words), years_, std::move(counts));
}

ScreenList load_screen_list(const std::filesystem::path& file) {
  std::istringstream in(read_text_file(file));
  ScreenList list;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    const std::string_view word = detail::trim(line);
    if (word.empty()) continue;
    if (!is_lemma_string(word)) {
      throw InputError(file.string() + ":" + std::to_string(number) +
                       ": screen entries must be lowercase letters");
    }
    list.kept.emplace(word);
  }
  if (list.kept.empty()) throw InputError("screen list is empty: " + file.string());
  return list;
}

FrequencyMatrix build_frequency_matrix(std::span<const YearDocument> docs,
                                       const LemmaMap& map) {
  if (docs.empty()) throw InputError("no documents to count");
  std::vector<int> years;
  years.reserve(docs.size());
  for (const auto& d : docs) years.push_back(d.year);
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return years[a] < years[b]; });
  std::sort(years.begin(), years.end());
  if (std::adjacent_find(years.begin(), years.end()) != years.end()) {
    throw InputError("duplicate year in corpus");
  }

  std::map<std::string, std::vector<FrequencyMatrix::Count>> table;
  for (std::size_t col = 0; col < order.size(); ++col) {
    for (const auto& token : docs[order[col]].tokens) {
      auto& row = table[map.lemmatize(token)];
      if (row.empty()) row.assign(years.size(), 0);
      ++row[col];
    }
  }

  std::vector<std::string> words;
  std::vector<FrequencyMatrix::Count> counts;
  words.reserve(table.size());
  counts.reserve(table.size() * years.size());
  for (auto& [word, row] : table) {
    words.push_back(word);
    counts.insert(counts.end(), row.begin(), row.end());
  }
  return FrequencyMatrix(std::move(words), std::move(years), std::move(counts));
}

FrequencyMatrix apply_screening(const FrequencyMatrix& m, const ScreenList& s) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < m.word_count(); ++i) {
    if (s.kept.contains(m.words()[i])) keep.push_back(i);
  }
  if (keep.empty()) throw InputError("screening removed every word");
  return m.select_rows(keep);
}

RankSplit rank_split(const FrequencyMatrix& m, std::size_t k) {
  if (k == 0 || k > m.word_count()) {
    throw InputError("rank split size " + std::to_string(k) +
                     " outside 1.." + std::to_string(m.word_count()));
  }
  std::vector<FrequencyMatrix::Count> totals(m.word_count());
  for (std::size_t i = 0; i < m.word_count(); ++i) totals[i] = m.row_total(i);

  std::vector<std::size_t> order(m.word_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Rows are already in lexicographic order, so the index breaks ties.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return totals[a] > totals[b];
  });

  std::vector<std::size_t> high(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<std::size_t> low(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
  std::sort(high.begin(), high.end());
  std::sort(low.begin(), low.end());
  return RankSplit{m.select_rows(high), m.select_rows(low)};
}

VocabularyDiff diff_vocabularies(std::span<const std::string> a,
                                 std::span<const std::string> b) {
  const std::set<std::string> sa(a.begin(), a.end());
  const std::set<std::string> sb(b.begin(), b.end());
  VocabularyDiff diff;
  std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(),
                      std::inserter(diff.only_a, diff.only_a.end()));
  std::set_difference(sb.begin(), sb.end(), sa.begin(), sa.end(),
                      std::inserter(diff.only_b, diff.only_b.end()));
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                        std::inserter(diff.both, diff.both.end()));
  return diff;
}

VocabularyDiff diff_vocabularies(const FrequencyMatrix& a, const FrequencyMatrix& b) {
  return diff_vocabularies(std::span<const std::string>(a.words()),
                           std::span<const std::string>(b.words()));
}

void write_frequency_csv(std::ostream& out, const FrequencyMatrix& m) {
  out << "word";
  for (int y : m.years()) out << ',' << y;
  out << '\n';
  for (std::size_t i = 0; i < m.word_count(); ++i) {
    out << m.words()[i];
    for (auto c : m.row(i)) out << ',' << c;
    out << '\n';
  }
}

FrequencyMatrix read_frequency_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("frequency CSV is empty");
  const auto header = detail::split(detail::trim(line), ',');
  if (header.empty() || header[0] != "word") {
    throw InputError("frequency CSV header must start with 'word'");
  }
  std::vector<int> years;
  for (std::size_t i = 1; i < header.size(); ++i) {
    int y = 0;
    if (!detail::parse_number(header[i], y)) {
      throw InputError("bad year in frequency CSV header: " + std::string(header[i]));
    }
    years.push_back(y);
  }
  std::vector<std::string> words;
  std::vector<FrequencyMatrix::Count> counts;
  for (std::size_t number = 2; std::getline(in, line); ++number) {
    const std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    const auto fields = detail::split(row, ',');
    if (fields.size() != header.size()) {
      throw InputError("frequency CSV line " + std::to_string(number) +
                       ": expected " + std::to_string(header.size()) + " fields");
    }
    words.emplace_back(fields[0]);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      FrequencyMatrix::Count c = 0;
      if (!detail::parse_number(fields[i], c)) {
        throw InputError("frequency CSV line " + std::to_string(number) +
                         ": bad count '" + std::string(fields[i]) + "'");
      }
      counts.push_back(c);
    }
  }
  return FrequencyMatrix(std::move(words), std::move(years), std::move(counts));
}

void save_frequency_csv(const std::filesystem::path& file, const FrequencyMatrix& m) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InputError("cannot write " + file.string());
  write_frequency_csv(out, m);
}

FrequencyMatrix load_frequency_csv(const std::filesystem::path& file) {
  std::istringstream in(read_text_file(file));
  return read_frequency_csv(in);
}

}  // namespace vocabtrend

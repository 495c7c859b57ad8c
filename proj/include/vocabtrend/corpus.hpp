#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vocabtrend {

using Sentence = std::vector<std::string>;

/// One year's exam text after cleaning.
struct YearDocument {
  int year = 0;
  std::vector<std::string> tokens;
  std::vector<Sentence> sentences;
};

/// Literal substrings deleted from raw text before any other cleaning,
/// applied in list order.
struct RemovalRuleSet {
  std::vector<std::string> literal_patterns;

  /// The twenty removed-token samples observed in the exam PDFs.
  static RemovalRuleSet defaults();
};

/// Expands `\n`, `\t`, `\r`, `\\`, `\uXXXX` and `\UXXXXXXXX` into UTF-8.
/// Unknown escapes are kept verbatim.
std::string unescape_pattern(std::string_view line);

/// One pattern per line, escapes expanded. Blank lines are skipped.
RemovalRuleSet load_rules(const std::filesystem::path& file);

/// Deletes rule patterns, then folds whitespace to spaces and drops every
/// byte that is not an ASCII letter, a space or one of `.!?`. Letters are
/// lowercased. Total and idempotent for rule sets whose patterns cannot
/// survive cleaning.
std::string clean_text(std::string_view raw, const RemovalRuleSet& rules);

/// Maximal runs of ASCII letters, lowercased.
std::vector<std::string> tokenize(std::string_view cleaned);

/// Splits on `.`, `!`, `?` and tokenizes each piece; empty sentences are
/// dropped.
std::vector<Sentence> extract_sentences(std::string_view cleaned);

/// Cleans, tokenizes and sentence-splits one raw text.
YearDocument make_document(int year, std::string_view raw,
                           const RemovalRuleSet& rules);

/// Reads the whole file; throws InputError naming it on failure.
std::string read_text_file(const std::filesystem::path& file);

/// Loads every `YYYY.txt` in `directory`, sorted by year. Other entries are
/// skipped with a warning on stderr.
std::vector<YearDocument> load_corpus(const std::filesystem::path& directory,
                                      const RemovalRuleSet& rules);

}  // namespace vocabtrend

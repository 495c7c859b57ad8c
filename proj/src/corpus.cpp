#include "vocabtrend/corpus.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <future>
#include <iostream>
#include <iterator>
#include <regex>
#include <sstream>

#include "vocabtrend/error.hpp"

namespace vocabtrend {
namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_ascii_letter(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char to_lower_ascii(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool parse_hex(std::string_view digits, std::uint32_t& value) {
  value = 0;
  for (char c : digits) {
    value <<= 4;
    if (c >= '0' && c <= '9') {
      value |= static_cast<std::uint32_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      value |= static_cast<std::uint32_t>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      value |= static_cast<std::uint32_t>(c - 'A' + 10);
    } else {
      return false;
    }
  }
  return value <= 0x10FFFF;
}

void erase_all(std::string& text, std::string_view pattern) {
  if (pattern.empty()) return;
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = text.find(pattern, pos);
    if (hit == std::string::npos) break;
    out.append(text, pos, hit - pos);
    pos = hit + pattern.size();
  }
  if (pos == 0) return;
  out.append(text, pos, std::string::npos);
  text = std::move(out);
}

}  // namespace

RemovalRuleSet RemovalRuleSet::defaults() {
  // The removed-token samples as they appeared in the converted exam text,
  // UTF-8 encoded. Two of the samples are empty strings and are omitted.
  return RemovalRuleSet{{
      "\xF3\xB0\xA0\x82",  // U+F0802
      "\n.\n",
      "(A),",
      "\xC3\xBF" "ffbfg.\n",  // U+00FF "ffbfg.\n"
      "\xF3\xB0\x80\xBB",  // U+F003B
      ".,",
      "(B),",
      "(e.\ng",
      "\xC3\x80" "c",  // U+00C0 "c"
      "(C),",
      "a.\nm",
      "\xC2\xA0",  // no-break space
      "_____",
      "(D),",
      "p.\nm.",
      "\r" "eturn",
      "-",
      "(E),",
  }};
}

std::string unescape_pattern(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c != '\\' || i + 1 >= line.size()) {
      out.push_back(c);
      continue;
    }
    const char next = line[i + 1];
    switch (next) {
      case 'n': out.push_back('\n'); ++i; continue;
      case 't': out.push_back('\t'); ++i; continue;
      case 'r': out.push_back('\r'); ++i; continue;
      case '\\': out.push_back('\\'); ++i; continue;
      case 'u':
      case 'U': {
        const std::size_t width = next == 'u' ? 4 : 8;
        std::uint32_t cp = 0;
        if (i + 2 + width <= line.size() &&
            parse_hex(line.substr(i + 2, width), cp)) {
          append_utf8(out, cp);
          i += 1 + width;
          continue;
        }
        break;
      }
      default:
        break;
    }
    out.push_back(c);
  }
  return out;
}

RemovalRuleSet load_rules(const std::filesystem::path& file) {
  std::istringstream in(read_text_file(file));
  RemovalRuleSet rules;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rules.literal_patterns.push_back(unescape_pattern(line));
  }
  return rules;
}

std::string clean_text(std::string_view raw, const RemovalRuleSet& rules) {
  std::string text(raw);
  for (const auto& pattern : rules.literal_patterns) erase_all(text, pattern);

  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (is_ascii_letter(c)) {
      out.push_back(to_lower_ascii(c));
    } else if (c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\v' ||
               c == '\f') {
      out.push_back(' ');
    } else if (is_terminator(c)) {
      out.push_back(c);
    }
    // Everything else, including every byte of a multi-byte sequence, goes.
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view cleaned) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : cleaned) {
    if (is_ascii_letter(c)) {
      current.push_back(to_lower_ascii(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<Sentence> extract_sentences(std::string_view cleaned) {
  std::vector<Sentence> sentences;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= cleaned.size(); ++i) {
    if (i == cleaned.size() || is_terminator(cleaned[i])) {
      auto tokens = tokenize(cleaned.substr(start, i - start));
      if (!tokens.empty()) sentences.push_back(std::move(tokens));
      start = i + 1;
    }
  }
  return sentences;
}

YearDocument make_document(int year, std::string_view raw,
                           const RemovalRuleSet& rules) {
  const std::string cleaned = clean_text(raw, rules);
  return YearDocument{year, tokenize(cleaned), extract_sentences(cleaned)};
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot read file: " + file.string());
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) throw InputError("cannot read file: " + file.string());
  return content;
}

std::vector<YearDocument> load_corpus(const std::filesystem::path& directory,
                                      const RemovalRuleSet& rules) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw InputError("corpus directory not found: " + directory.string());
  }

  static const std::regex year_file(R"(^(\d{4})\.txt$)");
  std::vector<std::pair<int, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    const std::string name = entry.path().filename().string();
    std::smatch match;
    if (entry.is_regular_file() && std::regex_match(name, match, year_file)) {
      files.emplace_back(std::stoi(match[1].str()), entry.path());
    } else {
      std::cerr << "warning: ignoring corpus entry " << name << '\n';
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<std::future<YearDocument>> pending;
  pending.reserve(files.size());
  for (const auto& [year, path] : files) {
    pending.push_back(std::async(std::launch::async, [&rules, year, path] {
      return make_document(year, read_text_file(path), rules);
    }));
  }
  std::vector<YearDocument> docs;
  docs.reserve(files.size());
  for (auto& f : pending) docs.push_back(f.get());
  return docs;
}

}  // namespace vocabtrend

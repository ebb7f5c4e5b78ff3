// Copyright 2026 The Elicit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "elicit/text_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "elicit/error.hpp"
#include "unicode.hpp"

namespace elicit {

namespace {

bool is_apostrophe(char32_t c) { return c == U'\'' || c == U'\u2019'; }

bool is_hyphen(char32_t c) { return c == U'-' || c == U'\u2010' || c == U'\u2011'; }

bool is_word_char(char32_t c) {
  return detail::is_letter(c) || detail::is_mark(c) || is_apostrophe(c);
}

bool is_terminator(char32_t c) { return c == U'.' || c == U'!' || c == U'?' || c == U'\u2026'; }

bool is_newline(char32_t c) {
  return c == U'\n' || c == U'\r' || c == U'\u2028' || c == U'\u2029' || c == U'\u0085';
}

bool is_tone_mark(char32_t c) {
  // grave, acute, circumflex, macron, caron
  return c == U'\u0300' || c == U'\u0301' || c == U'\u0302' || c == U'\u0304' || c == U'\u030C';
}

bool is_vowel(char32_t c) {
  switch (detail::to_lower(c)) {
    case U'a':
    case U'e':
    case U'i':
    case U'o':
    case U'u':
    case U'\u025B':
    case U'\u0254':
      return true;
    default:
      return false;
  }
}

std::string trim(std::u32string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && detail::is_white_space(text[begin])) ++begin;
  while (end > begin && detail::is_white_space(text[end - 1])) --end;
  return detail::to_utf8(text.substr(begin, end - begin));
}

}  // namespace

void TrigramProfile::merge(const TrigramProfile& other) {
  for (const auto& [gram, count] : other.counts) counts[gram] += count;
  total += other.total;
}

double TrigramProfile::norm() const {
  double sum = 0.0;
  for (const auto& [gram, count] : counts) {
    sum += static_cast<double>(count) * static_cast<double>(count);
  }
  return std::sqrt(sum);
}

std::string fold_case(std::string_view text) { return detail::folded_nfc(text); }

std::size_t code_point_count(std::string_view text) { return detail::to_utf32(text).size(); }

TokenSequence tokenize(std::string_view text) {
  TokenSequence seq;
  const std::u32string raw = detail::to_utf32(text);
  seq.source_char_count = raw.size();
  const std::u32string chars = detail::to_utf32(detail::folded_nfc(text));

  std::u32string current;
  bool has_letter = false;
  auto flush = [&] {
    if (has_letter) seq.tokens.push_back(detail::to_utf8(current));
    current.clear();
    has_letter = false;
  };
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const char32_t c = chars[i];
    if (is_word_char(c)) {
      current.push_back(c);
      has_letter = has_letter || detail::is_letter(c);
    } else if (is_hyphen(c) && !current.empty() && i + 1 < chars.size() &&
               is_word_char(chars[i + 1])) {
      current.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return seq;
}

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  const std::u32string chars = detail::to_utf32(text);
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::string sentence = trim(std::u32string_view(chars).substr(start, end - start));
    if (!sentence.empty()) sentences.push_back(std::move(sentence));
  };
  std::size_t i = 0;
  while (i < chars.size()) {
    if (is_terminator(chars[i])) {
      while (i < chars.size() && is_terminator(chars[i])) ++i;
      emit(i);
      start = i;
    } else if (is_newline(chars[i])) {
      emit(i);
      while (i < chars.size() && is_newline(chars[i])) ++i;
      start = i;
    } else {
      ++i;
    }
  }
  emit(chars.size());
  return sentences;
}

DiversityStats diversity(const TokenSequence& tokens) {
  DiversityStats stats;
  stats.total_tokens = tokens.size();
  if (stats.total_tokens == 0) return stats;
  std::unordered_map<std::string_view, std::size_t> freq;
  for (const auto& token : tokens.tokens) ++freq[token];
  stats.vocab_size = freq.size();
  for (const auto& [token, count] : freq) {
    if (count == 1) ++stats.hapax_count;
  }
  stats.ttr = static_cast<double>(stats.vocab_size) / static_cast<double>(stats.total_tokens);
  stats.hapax_ratio =
      static_cast<double>(stats.hapax_count) / static_cast<double>(stats.vocab_size);
  return stats;
}

double ngram_repetition(const TokenSequence& tokens, int n) {
  if (n < 1) throw ArgumentError("ngram_repetition: n must be >= 1, got " + std::to_string(n));
  const auto width = static_cast<std::size_t>(n);
  if (tokens.size() < width) return 0.0;
  const std::size_t total = tokens.size() - width + 1;
  std::set<std::vector<std::string_view>> unique;
  for (std::size_t i = 0; i < total; ++i) {
    unique.emplace(tokens.tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   tokens.tokens.begin() + static_cast<std::ptrdiff_t>(i + width));
  }
  return 1.0 - static_cast<double>(unique.size()) / static_cast<double>(total);
}

double sentence_repetition(std::span<const std::string> sentences) {
  if (sentences.empty()) return 0.0;
  std::set<std::string> unique;
  for (const auto& sentence : sentences) {
    unique.insert(trim(detail::to_utf32(detail::folded_nfc(sentence))));
  }
  return 1.0 - static_cast<double>(unique.size()) / static_cast<double>(sentences.size());
}

DiacriticStats diacritic_stats(std::string_view text) {
  DiacriticStats stats;
  const std::u32string chars = detail::to_utf32(detail::nfd(text));
  std::size_t vowels = 0;
  std::size_t tonal_vowels = 0;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const char32_t c = chars[i];
    if (c >= U'\u0300' && c <= U'\u036F') ++stats.combining_mark_count;
    if (!detail::is_letter(c)) continue;
    ++stats.alphabetic_count;
    if (!is_vowel(c)) continue;
    ++vowels;
    bool tonal = false;
    for (std::size_t j = i + 1; j < chars.size() && detail::is_mark(chars[j]); ++j) {
      tonal = tonal || is_tone_mark(chars[j]);
    }
    if (tonal) ++tonal_vowels;
  }
  stats.has_diacritics = stats.combining_mark_count > 0;
  if (stats.alphabetic_count > 0) {
    stats.diacritic_ratio = static_cast<double>(stats.combining_mark_count) /
                            static_cast<double>(stats.alphabetic_count);
  }
  if (vowels > 0) {
    stats.tonal_vowel_fraction = static_cast<double>(tonal_vowels) / static_cast<double>(vowels);
  }
  return stats;
}

std::string normalize_for_profile(std::string_view text) {
  const std::u32string chars = detail::to_utf32(detail::folded_nfc(text));
  std::u32string out;
  out.reserve(chars.size());
  bool pending_space = false;
  for (char32_t c : chars) {
    if (detail::is_white_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return detail::to_utf8(out);
}

TrigramProfile trigram_profile(std::string_view text) {
  TrigramProfile profile;
  const std::u32string body = detail::to_utf32(normalize_for_profile(text));
  if (body.empty()) return profile;
  std::u32string padded;
  padded.reserve(body.size() + 2);
  padded.push_back(U' ');
  padded += body;
  padded.push_back(U' ');
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    ++profile.counts[detail::to_utf8(std::u32string_view(padded).substr(i, 3))];
    ++profile.total;
  }
  return profile;
}

double cosine(const TrigramProfile& p, double p_norm, const TrigramProfile& q, double q_norm) {
  if (p.empty() || q.empty() || p_norm <= 0.0 || q_norm <= 0.0) return 0.0;
  const TrigramProfile& small = p.counts.size() <= q.counts.size() ? p : q;
  const TrigramProfile& large = &small == &p ? q : p;
  double dot = 0.0;
  for (const auto& [gram, count] : small.counts) {
    auto it = large.counts.find(gram);
    if (it != large.counts.end()) {
      dot += static_cast<double>(count) * static_cast<double>(it->second);
    }
  }
  return std::clamp(dot / (p_norm * q_norm), 0.0, 1.0);
}

double cosine(const TrigramProfile& p, const TrigramProfile& q) {
  return cosine(p, p.norm(), q, q.norm());
}

}  // namespace elicit

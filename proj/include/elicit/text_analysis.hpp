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


#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace elicit {

/// Case-folded, NFC-normalized word tokens of a text.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::size_t source_char_count = 0;  // code points in the input

  std::size_t size() const noexcept { return tokens.size(); }
};

struct DiversityStats {
  std::size_t total_tokens = 0;
  std::size_t vocab_size = 0;
  double ttr = 0.0;
  std::size_t hapax_count = 0;
  double hapax_ratio = 0.0;  // hapax_count / vocab_size
};

struct DiacriticStats {
  std::size_t alphabetic_count = 0;
  std::size_t combining_mark_count = 0;
  double diacritic_ratio = 0.0;
  bool has_diacritics = false;
  double tonal_vowel_fraction = 0.0;
};

/// Sparse character-trigram counts. Keys are UTF-8 strings of exactly three
/// code points; `total` is the sum of all counts.
struct TrigramProfile {
  std::map<std::string, std::int64_t> counts;
  std::int64_t total = 0;

  bool empty() const noexcept { return total == 0; }
  void merge(const TrigramProfile& other);
  double norm() const;
};

/// Tokens are maximal runs of letters, combining marks, apostrophes and
/// internal hyphens after NFC normalization and default case folding. Runs
/// without at least one letter are discarded; digits and punctuation split.
TokenSequence tokenize(std::string_view text);

/// Splits after each run of `.`, `!`, `?`, `…` and at every newline run.
/// Segments are trimmed and empty ones dropped.
std::vector<std::string> segment_sentences(std::string_view text);

DiversityStats diversity(const TokenSequence& tokens);

/// 1 - unique/total over overlapping n-grams; 0 when there are fewer than n
/// tokens. Throws ArgumentError when n < 1.
double ngram_repetition(const TokenSequence& tokens, int n = 4);

/// 1 - unique/total over case-folded, trimmed sentences; 0 for no sentences.
double sentence_repetition(std::span<const std::string> sentences);

/// Counts base letters and U+0300..U+036F combining marks in the NFD form.
/// A vowel is tonal when a grave, acute, circumflex, caron or macron follows it.
DiacriticStats diacritic_stats(std::string_view text);

/// NFC + case fold, whitespace runs collapsed to one space, trimmed. This is
/// the text trigram profiles are taken over (before boundary padding).
std::string normalize_for_profile(std::string_view text);

/// Overlapping trigrams of " " + normalize_for_profile(text) + " ".
/// Whitespace-only and empty texts give an empty profile.
TrigramProfile trigram_profile(std::string_view text);

/// Cosine of the two count vectors, in [0, 1]; 0 if either is empty.
double cosine(const TrigramProfile& p, const TrigramProfile& q);

/// Cosine with precomputed norms, for repeated scoring against fixed profiles.
double cosine(const TrigramProfile& p, double p_norm, const TrigramProfile& q, double q_norm);

/// Default Unicode case folding followed by NFC.
std::string fold_case(std::string_view text);

/// Number of Unicode scalar values in a UTF-8 string.
std::size_t code_point_count(std::string_view text);

}  // namespace elicit

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace qcpd {

/// Lowercased word tokens: runs of letters/digits (non-ASCII bytes count as
/// letters) with internal apostrophes or hyphens kept.
std::vector<std::string> tokenize_words(std::string_view text);

/// Sentence terminator runs ([.!?]+ after a word, followed by whitespace or
/// end of text). Text with words but no terminator is one sentence.
int count_sentences(std::string_view text);

/// Vowel-group count with a silent trailing 'e' (not after a consonant + 'l'),
/// at least 1 for any token.
int count_syllables(std::string_view word);

/// 174-word English stopword list.
const std::unordered_set<std::string>& stopwords();
/// Dale-Chall familiar words.
const std::unordered_set<std::string>& easy_words();

/// Non-stopword tokens divided by all tokens; 0 for empty text.
double information_noise_score(std::string_view plain_text);

struct TextStatistics {
  long words = 0;
  long sentences = 0;
  long syllables = 0;
  long letters = 0;          // alphabetic bytes (UTF-8 lead bytes for non-ASCII)
  long characters = 0;       // letters and digits
  long polysyllables = 0;    // tokens with >= 3 syllables
  long unfamiliar_tokens = 0;// word tokens missing from the easy list (with repeats)
  long difficult_types = 0;  // distinct unfamiliar words longer than 2 characters
};

TextStatistics text_statistics(std::string_view plain_text);

/// F26..F34 in this order: Flesch reading ease, Flesch-Kincaid grade,
/// automated readability index, Coleman-Liau, Gunning fog, SMOG, difficult
/// words, Dale-Chall, Linsear write. All zero for text without words.
std::array<double, 9> readability_features(std::string_view plain_text);
std::array<double, 9> readability_from_statistics(const TextStatistics& s);

}  // namespace qcpd

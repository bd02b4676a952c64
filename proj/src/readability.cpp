#include "qcpd/readability.hpp"

#include <cctype>
#include <cmath>

namespace qcpd {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }
bool is_letter_byte(unsigned char c) { return std::isalpha(c) || c >= 0xC0; }
bool is_vowel(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y': return true;
    default: return false;
  }
}

}  // namespace

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::string token;
    while (i < text.size()) {
      auto c = static_cast<unsigned char>(text[i]);
      if (is_word_byte(c)) {
        token += static_cast<char>(std::tolower(c));
        ++i;
      } else if ((c == '\'' || c == '-') && i + 1 < text.size() &&
                 is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
        token += static_cast<char>(c);
        ++i;
      } else {
        break;
      }
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

int count_sentences(std::string_view text) {
  int sentences = 0;
  bool seen_word = false;
  bool word_since_terminator = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto c = static_cast<unsigned char>(text[i]);
    if (is_word_byte(c)) {
      seen_word = true;
      word_since_terminator = true;
      continue;
    }
    if ((c == '.' || c == '!' || c == '?') && word_since_terminator) {
      std::size_t j = i;
      while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
      if (j == text.size() || std::isspace(static_cast<unsigned char>(text[j])) || text[j] == '"' ||
          text[j] == ')' || text[j] == '\'') {
        ++sentences;
        word_since_terminator = false;
      }
      i = j - 1;
    }
  }
  if (word_since_terminator) ++sentences;
  if (seen_word && sentences == 0) sentences = 1;
  return sentences;
}

int count_syllables(std::string_view word) {
  std::string w;
  for (char c : word)
    if (std::isalpha(static_cast<unsigned char>(c))) w += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  int groups = 0;
  bool prev_vowel = false;
  for (char c : w) {
    bool v = is_vowel(c);
    if (v && !prev_vowel) ++groups;
    prev_vowel = v;
  }
  if (groups > 1 && w.size() > 2 && w.back() == 'e') {
    bool consonant_le = w[w.size() - 2] == 'l' && w.size() > 2 && !is_vowel(w[w.size() - 3]);
    if (!consonant_le && !is_vowel(w[w.size() - 2])) --groups;
  }
  return groups < 1 ? 1 : groups;
}

double information_noise_score(std::string_view plain_text) {
  auto tokens = tokenize_words(plain_text);
  if (tokens.empty()) return 0.0;
  const auto& stop = stopwords();
  long kept = 0;
  for (const auto& t : tokens)
    if (!stop.contains(t)) ++kept;
  return static_cast<double>(kept) / static_cast<double>(tokens.size());
}

TextStatistics text_statistics(std::string_view plain_text) {
  TextStatistics s;
  auto tokens = tokenize_words(plain_text);
  if (tokens.empty()) return s;
  const auto& easy = easy_words();
  std::unordered_set<std::string> difficult;
  for (const auto& t : tokens) {
    ++s.words;
    int syl = count_syllables(t);
    s.syllables += syl;
    if (syl >= 3) ++s.polysyllables;
    bool has_letter = false;
    for (char ch : t) {
      auto c = static_cast<unsigned char>(ch);
      if (is_letter_byte(c)) {
        ++s.letters;
        ++s.characters;
        has_letter = true;
      } else if (std::isdigit(c)) {
        ++s.characters;
      }
    }
    if (has_letter && !easy.contains(t)) {
      ++s.unfamiliar_tokens;
      if (t.size() > 2) difficult.insert(t);
    }
  }
  s.difficult_types = static_cast<long>(difficult.size());
  s.sentences = count_sentences(plain_text);
  return s;
}

std::array<double, 9> readability_from_statistics(const TextStatistics& s) {
  std::array<double, 9> f{};
  if (s.words == 0 || s.sentences == 0) return f;
  const double words = static_cast<double>(s.words);
  const double sentences = static_cast<double>(s.sentences);
  const double wps = words / sentences;
  const double spw = static_cast<double>(s.syllables) / words;

  f[0] = 206.835 - 1.015 * wps - 84.6 * spw;
  f[1] = 0.39 * wps + 11.8 * spw - 15.59;
  f[2] = 4.71 * (static_cast<double>(s.characters) / words) + 0.5 * wps - 21.43;
  const double letters_per_100 = 100.0 * static_cast<double>(s.letters) / words;
  const double sentences_per_100 = 100.0 * sentences / words;
  f[3] = 0.0588 * letters_per_100 - 0.296 * sentences_per_100 - 15.8;
  f[4] = 0.4 * (wps + 100.0 * static_cast<double>(s.polysyllables) / words);
  f[5] = 1.043 * std::sqrt(static_cast<double>(s.polysyllables) * 30.0 / sentences) + 3.1291;
  f[6] = static_cast<double>(s.difficult_types);
  const double pct_unfamiliar = 100.0 * static_cast<double>(s.unfamiliar_tokens) / words;
  f[7] = 0.1579 * pct_unfamiliar + 0.0496 * wps + (pct_unfamiliar > 5.0 ? 3.6365 : 0.0);
  const double linsear = (static_cast<double>(s.words - s.polysyllables) + 3.0 * static_cast<double>(s.polysyllables)) /
                         sentences;
  f[8] = linsear > 20.0 ? linsear / 2.0 : (linsear - 2.0) / 2.0;
  return f;
}

std::array<double, 9> readability_features(std::string_view plain_text) {
  return readability_from_statistics(text_statistics(plain_text));
}

}  // namespace qcpd

#include <string>
#include <unordered_set>

#include "qcpd/readability.hpp"

namespace qcpd {

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words = {
#include "data/stopwords.inc"
  };
  return words;
}

const std::unordered_set<std::string>& easy_words() {
  static const std::unordered_set<std::string> words = {
#include "data/easy_words.inc"
  };
  return words;
}

}  // namespace qcpd

#pragma once

// Reader for MediaWiki XML export files (page -> revision -> timestamp,
// contributor, text). Pages whose title starts with "Talk:" are attached to
// their subject page.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcpd/model.hpp"

namespace qcpd {

class XmlParseError : public std::runtime_error {
 public:
  XmlParseError(const std::string& message, std::int64_t byte_offset)
      : std::runtime_error(message + " at byte " + std::to_string(byte_offset)), byte_offset_(byte_offset) {}
  std::int64_t byte_offset() const { return byte_offset_; }

 private:
  std::int64_t byte_offset_;
};

/// One <page> element as it appears in the dump.
struct DumpPage {
  std::string title;
  int ns = -1;  // -1 when the dump has no <ns> element
  std::vector<Revision> revisions;  // in document order, page_kind unset
};

/// Streams pages to `on_page` one at a time. Unknown elements are skipped.
/// Throws XmlParseError on malformed input.
void stream_mediawiki_xml(std::istream& in, const std::function<void(DumpPage&&)>& on_page);

/// Subject title for "Talk:Foo" -> "Foo"; empty for other titles.
std::string talk_subject(std::string_view title);

/// Pairs main and talk pages into histories sorted by article id. Revisions
/// are stably sorted by timestamp; the creation time is the earliest revision
/// on either page. Pages whose <ns> is neither 0 nor 1 are dropped.
std::vector<PageHistory> assemble_histories(std::vector<DumpPage> pages);

std::vector<PageHistory> parse_mediawiki_xml(std::istream& in);
std::vector<PageHistory> parse_mediawiki_xml_file(const std::filesystem::path& path);

}  // namespace qcpd

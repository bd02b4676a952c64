#pragma once

// Lightweight wikitext scanning: construct counts, template enumeration and
// plain-text rendering. No template expansion is performed.

#include <string>
#include <string_view>
#include <vector>

namespace qcpd {

struct MarkerCounts {
  long refs = 0;
  long wikilinks = 0;
  long external_links = 0;
  long citation_templates = 0;
  long noncitation_templates = 0;
  long categories = 0;
  long images = 0;
  long level2_headings = 0;
  long level3plus_headings = 0;
  bool has_infobox = false;
  long byte_length = 0;

  friend bool operator==(const MarkerCounts&, const MarkerCounts&) = default;
};

/// A completed {{...}} construct.
struct TemplateSpan {
  std::size_t begin = 0;  // offset of the opening braces
  std::size_t end = 0;    // one past the closing braces
  std::string name;       // trimmed, "Template:"/"subst:" prefixes removed
  bool top_level = false; // not enclosed by another completed template

  /// Text between the braces.
  std::string_view inner(std::string_view text) const { return text.substr(begin + 2, end - begin - 4); }
};

/// Counts constructs in one pass over the text. Only completed constructs are
/// counted; unbalanced input never fails.
///
///  - refs: `<ref ...>` and `<ref .../>` opening tags.
///  - wikilinks: `[[target]]` where target carries no namespace or interwiki prefix.
///  - categories / images: `[[Category:..]]`, `[[File:..]]` / `[[Image:..]]`.
///  - citation templates: name starts with "cite" or "citation", at any depth.
///  - non-citation templates: every other top-level transclusion, except
///    infoboxes, parser functions (`#if:`) and magic words (`DEFAULTSORT:`).
///  - has_infobox: any template whose name starts with "infobox".
///  - headings: `== x ==` is level 2, three or more `=` is level 3+; only
///    outside templates and links.
///  - byte_length: UTF-8 byte count of the raw text.
MarkerCounts parse_wikitext_markers(std::string_view text);

/// Every completed template in order of its opening braces.
std::vector<TemplateSpan> find_templates(std::string_view text);

struct TemplateParam {
  std::string name;  // empty for positional parameters
  std::string value;
};

/// Splits template inner text on top-level '|'; the first piece (the name) is
/// dropped. Named parameters have trimmed names and values.
std::vector<TemplateParam> template_params(std::string_view inner);

/// Normalized template name: trimmed, "Template:"/"subst:"/"safesubst:"
/// prefixes removed, underscores turned into spaces.
std::string normalize_template_name(std::string_view raw);

/// Readable text: templates, refs, comments, tables, headings, file and
/// category links removed; link display text and external link labels kept;
/// emphasis quotes and HTML tags stripped.
std::string wikitext_to_plain(std::string_view text);

bool iequals_prefix(std::string_view text, std::string_view prefix);

}  // namespace qcpd

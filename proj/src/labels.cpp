#include "qcpd/labels.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "qcpd/wikitext.hpp"

namespace qcpd {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

bool is_assessment_banner(std::string_view template_name) {
  std::string name = lower(template_name);
  if (name.starts_with("wikiproject")) return true;
  // Abbreviated banners such as "WPMILHIST" or "WP Film".
  if (name.size() > 2 && name.starts_with("wp") && (std::isalpha(static_cast<unsigned char>(name[2])) || name[2] == ' '))
    return true;
  return name == "article assessment" || name == "assessment";
}

std::optional<RawClass> banner_class(std::string_view wikitext) {
  for (const TemplateSpan& t : find_templates(wikitext)) {
    if (!is_assessment_banner(t.name)) continue;
    for (const TemplateParam& p : template_params(t.inner(wikitext))) {
      if (lower(p.name) != "class") continue;
      if (auto raw = try_parse_raw_class(p.value)) return raw;
    }
  }
  return std::nullopt;
}

std::vector<QualityLabelEvent> extract_quality_labels(std::span<const Revision> talk_revisions) {
  std::vector<QualityLabelEvent> events;
  std::optional<RawClass> previous;
  for (const Revision& rev : talk_revisions) {
    auto raw = banner_class(rev.wikitext);
    if (!raw || raw == previous) continue;
    events.push_back(QualityLabelEvent::make(rev.timestamp, *raw));
    previous = raw;
  }
  return events;
}

}  // namespace qcpd

#include "qcpd/wikitext.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace qcpd {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower(c);
  return out;
}

bool at(std::string_view text, std::size_t pos, std::string_view token) {
  return text.substr(pos, token.size()) == token;
}

bool at_ci(std::string_view text, std::size_t pos, std::string_view token) {
  return pos <= text.size() && iequals_prefix(text.substr(pos), token);
}

std::size_t find_ci(std::string_view text, std::size_t from, std::string_view token) {
  for (std::size_t i = from; i + token.size() <= text.size(); ++i)
    if (at_ci(text, i, token)) return i;
  return std::string_view::npos;
}

bool is_line_start(std::string_view text, std::size_t pos) { return pos == 0 || text[pos - 1] == '\n'; }

// "<ref" followed by a tag boundary.
bool at_ref_open(std::string_view text, std::size_t pos) {
  if (!at_ci(text, pos, "<ref")) return false;
  if (pos + 4 >= text.size()) return false;
  char next = text[pos + 4];
  return next == '>' || next == '/' || is_space(next);
}

bool at_url_scheme(std::string_view text, std::size_t pos) {
  return at_ci(text, pos, "http://") || at_ci(text, pos, "https://") || at_ci(text, pos, "ftp://") ||
         at(text, pos, "//");
}

// Heading level if the line starting at pos is "==...== text ==...==", else 0.
int heading_level(std::string_view text, std::size_t pos) {
  std::size_t nl = text.find('\n', pos);
  std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
  while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
  std::size_t lead = 0, tail = 0;
  while (lead < line.size() && line[lead] == '=') ++lead;
  while (tail < line.size() && line[line.size() - 1 - tail] == '=') ++tail;
  if (lead == 0 || tail == 0 || line.size() <= lead + tail) return 0;
  return static_cast<int>(std::min({lead, tail, std::size_t{6}}));
}

constexpr std::array<std::string_view, 40> kNamespaces = {
    "category", "file",       "image",     "media",     "template",  "wikipedia", "wp",         "project",
    "help",     "portal",     "user",      "talk",      "special",   "draft",     "module",     "mediawiki",
    "book",     "timedtext",  "wiktionary", "wikt",     "wikisource", "s",        "wikiquote",  "q",
    "commons",  "meta",       "m",         "w",         "wikinews",  "n",         "wikibooks",  "b",
    "wikiversity", "v",       "wikivoyage", "voy",      "species",   "d",         "wikidata",   "mw",
};

enum class LinkKind { Article, Category, Image, Other };

bool looks_like_language_code(std::string_view prefix) {
  // "fr", "zh-yue", "simple": lowercase letters with optional hyphenated parts.
  if (prefix.size() < 2 || prefix.size() > 12) return false;
  for (char c : prefix)
    if (!((c >= 'a' && c <= 'z') || c == '-')) return false;
  return prefix.front() != '-' && prefix.back() != '-';
}

LinkKind classify_link(std::string_view inner) {
  std::string_view target = inner.substr(0, inner.find('|'));
  target = trim(target);
  bool leading_colon = !target.empty() && target.front() == ':';
  if (leading_colon) target = trim(target.substr(1));
  if (target.empty() || target.front() == '#') return LinkKind::Other;
  std::size_t colon = target.find(':');
  if (colon == std::string_view::npos) return LinkKind::Article;
  std::string_view raw_prefix = trim(target.substr(0, colon));
  std::string prefix = to_lower(raw_prefix);
  for (char& c : prefix)
    if (c == '_') c = ' ';
  if (!leading_colon && prefix == "category") return LinkKind::Category;
  if (!leading_colon && (prefix == "file" || prefix == "image")) return LinkKind::Image;
  if (std::find(kNamespaces.begin(), kNamespaces.end(), prefix) != kNamespaces.end()) return LinkKind::Other;
  if (prefix.size() > 5 && prefix.ends_with(" talk")) return LinkKind::Other;
  if (looks_like_language_code(raw_prefix)) return LinkKind::Other;
  return LinkKind::Article;
}

// First piece of template inner text, up to a '|' outside nested constructs.
std::string_view template_head(std::string_view inner) {
  int depth = 0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (at(inner, i, "{{") || at(inner, i, "[[")) {
      ++depth;
      ++i;
    } else if ((at(inner, i, "}}") || at(inner, i, "]]")) && depth > 0) {
      --depth;
      ++i;
    } else if (inner[i] == '|' && depth == 0) {
      return inner.substr(0, i);
    }
  }
  return inner;
}

class MarkerScanner {
 public:
  explicit MarkerScanner(std::string_view text) : text_(text) {}

  void run() {
    std::size_t pos = 0;
    while (pos < text_.size()) {
      if (stack_.empty() && is_line_start(text_, pos) && text_[pos] == '=') {
        int level = heading_level(text_, pos);
        if (level == 2) ++counts_.level2_headings;
        if (level >= 3) ++counts_.level3plus_headings;
      }
      if (at(text_, pos, "<!--")) {
        std::size_t close = text_.find("-->", pos + 4);
        pos = close == std::string_view::npos ? text_.size() : close + 3;
      } else if (at_ci(text_, pos, "<nowiki>")) {
        std::size_t close = find_ci(text_, pos + 8, "</nowiki>");
        pos = close == std::string_view::npos ? text_.size() : close + 9;
      } else if (at_ref_open(text_, pos)) {
        std::size_t close = text_.find('>', pos + 4);
        if (close == std::string_view::npos) {
          ++pos;
        } else {
          ++counts_.refs;
          pos = close + 1;
        }
      } else if (at(text_, pos, "{{")) {
        stack_.push_back({Frame::Template, pos, {}});
        pos += 2;
      } else if (at(text_, pos, "}}")) {
        close(Frame::Template, pos + 2);
        pos += 2;
      } else if (at(text_, pos, "[[")) {
        stack_.push_back({Frame::Link, pos, {}});
        pos += 2;
      } else if (at(text_, pos, "]]")) {
        close(Frame::Link, pos + 2);
        pos += 2;
      } else if (text_[pos] == '[' && at_url_scheme(text_, pos + 1)) {
        std::size_t close = text_.find_first_of("]\n", pos + 1);
        if (close != std::string_view::npos && text_[close] == ']') ++counts_.external_links;
        ++pos;
      } else {
        ++pos;
      }
    }
    while (!stack_.empty()) discard_top();
  }

  MarkerCounts counts() {
    MarkerCounts c = counts_;
    c.byte_length = static_cast<long>(text_.size());
    for (const auto& t : templates_) {
      if (t.name.empty() || t.name.front() == '#' || t.name.find(':') != std::string::npos) continue;
      if (iequals_prefix(t.name, "infobox")) {
        c.has_infobox = true;
      } else if (iequals_prefix(t.name, "cite") || iequals_prefix(t.name, "citation")) {
        ++c.citation_templates;
      } else if (t.top_level) {
        ++c.noncitation_templates;
      }
    }
    return c;
  }

  std::vector<TemplateSpan> templates() {
    auto out = templates_;
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.begin < b.begin; });
    return out;
  }

 private:
  struct Frame {
    enum Kind { Template, Link } kind;
    std::size_t begin;
    std::vector<std::size_t> pending;  // completed templates nested in this frame
  };

  // Index of the nearest template frame strictly below `above`, or -1.
  long enclosing_template(std::size_t above) const {
    for (long i = static_cast<long>(above) - 1; i >= 0; --i)
      if (stack_[i].kind == Frame::Template) return i;
    return -1;
  }

  void adopt(std::size_t above, const std::vector<std::size_t>& ids) {
    long parent = enclosing_template(above);
    for (std::size_t id : ids) {
      if (parent >= 0)
        stack_[parent].pending.push_back(id);
      else
        templates_[id].top_level = true;
    }
  }

  void discard_top() {
    Frame top = std::move(stack_.back());
    stack_.pop_back();
    adopt(stack_.size(), top.pending);
  }

  void close(Frame::Kind kind, std::size_t end) {
    long match = -1;
    for (long i = static_cast<long>(stack_.size()) - 1; i >= 0; --i) {
      if (stack_[i].kind == kind) {
        match = i;
        break;
      }
    }
    if (match < 0) return;
    while (static_cast<long>(stack_.size()) - 1 > match) discard_top();
    Frame frame = std::move(stack_.back());
    stack_.pop_back();
    std::string_view inner = text_.substr(frame.begin + 2, end - frame.begin - 4);
    if (kind == Frame::Link) {
      switch (classify_link(inner)) {
        case LinkKind::Article: ++counts_.wikilinks; break;
        case LinkKind::Category: ++counts_.categories; break;
        case LinkKind::Image: ++counts_.images; break;
        case LinkKind::Other: break;
      }
      adopt(stack_.size(), frame.pending);
      return;
    }
    TemplateSpan span;
    span.begin = frame.begin;
    span.end = end;
    span.name = normalize_template_name(template_head(inner));
    templates_.push_back(std::move(span));
    adopt(stack_.size(), {templates_.size() - 1});
  }

  std::string_view text_;
  std::vector<Frame> stack_;
  std::vector<TemplateSpan> templates_;
  MarkerCounts counts_;
};

// Offset one past the construct closing the one that opens at `pos`, counting
// nested openers; npos when unbalanced.
std::size_t find_matching(std::string_view text, std::size_t pos, std::string_view open, std::string_view close) {
  int depth = 0;
  std::size_t i = pos;
  while (i < text.size()) {
    if (at(text, i, open)) {
      ++depth;
      i += open.size();
    } else if (at(text, i, close)) {
      if (--depth == 0) return i + close.size();
      i += close.size();
    } else {
      ++i;
    }
  }
  return std::string_view::npos;
}

struct Entity {
  std::string_view name;
  std::string_view replacement;
};

constexpr std::array<Entity, 8> kEntities = {{
    {"&nbsp;", " "},
    {"&amp;", "&"},
    {"&lt;", "<"},
    {"&gt;", ">"},
    {"&quot;", "\""},
    {"&ndash;", "-"},
    {"&mdash;", "-"},
    {"&#39;", "'"},
}};

void render_plain(std::string_view t, std::string& out) {
  std::size_t i = 0;
  while (i < t.size()) {
    if (is_line_start(t, i)) {
      if (t[i] == '=' && heading_level(t, i) > 0) {
        std::size_t nl = t.find('\n', i);
        i = nl == std::string_view::npos ? t.size() : nl + 1;
        out += '\n';
        continue;
      }
      if (at(t, i, "{|")) {
        std::size_t end = find_matching(t, i, "{|", "|}");
        i = end == std::string_view::npos ? i + 2 : end;
        continue;
      }
      while (i < t.size() && (t[i] == '*' || t[i] == '#' || t[i] == ':' || t[i] == ';')) ++i;
      if (i >= t.size()) break;
    }
    if (at(t, i, "<!--")) {
      std::size_t close = t.find("-->", i + 4);
      i = close == std::string_view::npos ? t.size() : close + 3;
    } else if (at_ci(t, i, "<nowiki>")) {
      std::size_t close = find_ci(t, i + 8, "</nowiki>");
      std::size_t stop = close == std::string_view::npos ? t.size() : close;
      out.append(t.substr(i + 8, stop - (i + 8)));
      i = close == std::string_view::npos ? t.size() : close + 9;
    } else if (at_ref_open(t, i)) {
      std::size_t tag_end = t.find('>', i + 4);
      if (tag_end == std::string_view::npos) {
        i = t.size();
      } else if (t[tag_end - 1] == '/') {
        i = tag_end + 1;
      } else {
        std::size_t close = find_ci(t, tag_end + 1, "</ref>");
        i = close == std::string_view::npos ? tag_end + 1 : close + 6;
      }
    } else if (t[i] == '<' && i + 1 < t.size() &&
               (std::isalpha(static_cast<unsigned char>(t[i + 1])) || t[i + 1] == '/')) {
      std::size_t close = t.find('>', i + 1);
      if (close == std::string_view::npos) {
        out += t[i++];
      } else {
        i = close + 1;
      }
    } else if (at(t, i, "{{")) {
      std::size_t end = find_matching(t, i, "{{", "}}");
      i = end == std::string_view::npos ? i + 2 : end;
    } else if (at(t, i, "[[")) {
      std::size_t end = find_matching(t, i, "[[", "]]");
      if (end == std::string_view::npos) {
        i += 2;
        continue;
      }
      std::string_view inner = t.substr(i + 2, end - i - 4);
      if (classify_link(inner) == LinkKind::Article) {
        std::size_t pipe = inner.find('|');
        std::string_view shown = pipe == std::string_view::npos ? inner : inner.substr(pipe + 1);
        if (pipe == std::string_view::npos && !shown.empty() && shown.front() == ':') shown.remove_prefix(1);
        render_plain(shown, out);
      }
      i = end;
    } else if (t[i] == '[' && at_url_scheme(t, i + 1)) {
      std::size_t close = t.find_first_of("]\n", i + 1);
      if (close == std::string_view::npos || t[close] != ']') {
        ++i;
        continue;
      }
      std::string_view inner = t.substr(i + 1, close - i - 1);
      std::size_t space = inner.find(' ');
      if (space != std::string_view::npos) render_plain(inner.substr(space + 1), out);
      i = close + 1;
    } else if (at(t, i, "''")) {
      while (i < t.size() && t[i] == '\'') ++i;
    } else if (at(t, i, "__")) {
      std::size_t close = t.find("__", i + 2);
      bool magic = close != std::string_view::npos && close > i + 2;
      for (std::size_t k = i + 2; magic && k < close; ++k)
        if (!std::isupper(static_cast<unsigned char>(t[k]))) magic = false;
      if (magic) {
        i = close + 2;
      } else {
        out += t[i++];
      }
    } else if (t[i] == '&') {
      bool replaced = false;
      for (const auto& e : kEntities) {
        if (at(t, i, e.name)) {
          out.append(e.replacement);
          i += e.name.size();
          replaced = true;
          break;
        }
      }
      if (!replaced) out += t[i++];
    } else {
      out += t[i++];
    }
  }
}

}  // namespace

bool iequals_prefix(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (lower(text[i]) != lower(prefix[i])) return false;
  return true;
}

std::string normalize_template_name(std::string_view raw) {
  std::string_view name = trim(raw);
  for (std::string_view prefix : {"safesubst:", "subst:", "template:"}) {
    if (iequals_prefix(name, prefix)) name = trim(name.substr(prefix.size()));
  }
  std::string out(name);
  for (char& c : out)
    if (c == '_') c = ' ';
  return out;
}

MarkerCounts parse_wikitext_markers(std::string_view text) {
  MarkerScanner scanner(text);
  scanner.run();
  return scanner.counts();
}

std::vector<TemplateSpan> find_templates(std::string_view text) {
  MarkerScanner scanner(text);
  scanner.run();
  return scanner.templates();
}

std::vector<TemplateParam> template_params(std::string_view inner) {
  std::vector<std::string_view> pieces;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (at(inner, i, "{{") || at(inner, i, "[[")) {
      ++depth;
      ++i;
    } else if ((at(inner, i, "}}") || at(inner, i, "]]")) && depth > 0) {
      --depth;
      ++i;
    } else if (inner[i] == '|' && depth == 0) {
      pieces.push_back(inner.substr(start, i - start));
      start = i + 1;
    }
  }
  pieces.push_back(inner.substr(start));

  std::vector<TemplateParam> params;
  for (std::size_t k = 1; k < pieces.size(); ++k) {
    std::string_view piece = pieces[k];
    std::size_t eq = std::string_view::npos;
    int d = 0;
    for (std::size_t i = 0; i < piece.size(); ++i) {
      if (at(piece, i, "{{") || at(piece, i, "[[")) {
        ++d;
        ++i;
      } else if ((at(piece, i, "}}") || at(piece, i, "]]")) && d > 0) {
        --d;
        ++i;
      } else if (piece[i] == '=' && d == 0) {
        eq = i;
        break;
      }
    }
    if (eq == std::string_view::npos)
      params.push_back({"", std::string(piece)});
    else
      params.push_back({std::string(trim(piece.substr(0, eq))), std::string(trim(piece.substr(eq + 1)))});
  }
  return params;
}

std::string wikitext_to_plain(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  render_plain(text, out);
  return out;
}

}  // namespace qcpd

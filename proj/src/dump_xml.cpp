#include "qcpd/dump_xml.hpp"

#include <expat.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>

namespace qcpd {

namespace {

enum class Field { None, Title, Ns, Timestamp, Username, Ip, Text };

class DumpHandler {
 public:
  explicit DumpHandler(const std::function<void(DumpPage&&)>& on_page) : on_page_(on_page) {}

  void start(std::string_view name) {
    path_.emplace_back(name);
    text_.clear();
    field_ = Field::None;
    if (name == "page") {
      page_ = DumpPage{};
      in_page_ = true;
    } else if (in_page_ && name == "revision") {
      rev_ = Revision{};
      username_.clear();
      ip_.clear();
      in_revision_ = true;
    } else if (in_page_ && !in_revision_ && parent_is("page")) {
      if (name == "title") field_ = Field::Title;
      else if (name == "ns") field_ = Field::Ns;
    } else if (in_revision_ && parent_is("revision")) {
      if (name == "timestamp") field_ = Field::Timestamp;
      else if (name == "text") field_ = Field::Text;
    } else if (in_revision_ && parent_is("contributor")) {
      if (name == "username") field_ = Field::Username;
      else if (name == "ip") field_ = Field::Ip;
    }
  }

  void characters(std::string_view chunk) {
    if (field_ != Field::None) text_.append(chunk);
  }

  void end(std::string_view name) {
    switch (field_) {
      case Field::Title: page_.title = text_; break;
      case Field::Ns: page_.ns = std::stoi(text_); break;
      case Field::Timestamp: rev_.timestamp = parse_timestamp(text_); break;
      case Field::Username: username_ = text_; break;
      case Field::Ip: ip_ = text_; break;
      case Field::Text: rev_.wikitext = text_; break;
      case Field::None: break;
    }
    field_ = Field::None;
    text_.clear();

    if (in_revision_ && name == "revision") {
      if (!ip_.empty()) {
        rev_.editor_id = ip_;
        rev_.registered = false;
      } else {
        rev_.editor_id = username_.empty() ? "#hidden" : username_;
        rev_.registered = true;
      }
      page_.revisions.push_back(std::move(rev_));
      in_revision_ = false;
    } else if (in_page_ && name == "page") {
      in_page_ = false;
      on_page_(std::move(page_));
    }
    path_.pop_back();
  }

 private:
  bool parent_is(std::string_view name) const { return path_.size() >= 2 && path_[path_.size() - 2] == name; }

  const std::function<void(DumpPage&&)>& on_page_;
  std::vector<std::string> path_;
  Field field_ = Field::None;
  std::string text_;
  DumpPage page_;
  Revision rev_;
  std::string username_;
  std::string ip_;
  bool in_page_ = false;
  bool in_revision_ = false;
};

// Element names may carry a namespace prefix ("mw:page"); keep the local part.
std::string_view local_name(const XML_Char* name) {
  std::string_view n(name);
  auto colon = n.rfind(':');
  return colon == std::string_view::npos ? n : n.substr(colon + 1);
}

struct ParserState {
  DumpHandler* handler;
  std::string error;
};

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char**) {
  auto* st = static_cast<ParserState*>(data);
  st->handler->start(local_name(name));
}

void XMLCALL on_end(void* data, const XML_Char* name) {
  auto* st = static_cast<ParserState*>(data);
  try {
    st->handler->end(local_name(name));
  } catch (const std::exception& e) {
    if (st->error.empty()) st->error = e.what();
  }
}

void XMLCALL on_chars(void* data, const XML_Char* s, int len) {
  auto* st = static_cast<ParserState*>(data);
  st->handler->characters(std::string_view(s, static_cast<std::size_t>(len)));
}

}  // namespace

void stream_mediawiki_xml(std::istream& in, const std::function<void(DumpPage&&)>& on_page) {
  DumpHandler handler(on_page);
  ParserState state{&handler, {}};
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                                      &XML_ParserFree);
  if (!parser) throw std::runtime_error("cannot create XML parser");
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_chars);

  std::vector<char> buffer(1 << 16);
  while (true) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    std::streamsize got = in.gcount();
    bool final = got < static_cast<std::streamsize>(buffer.size());
    auto status = XML_Parse(parser.get(), buffer.data(), static_cast<int>(got), final);
    if (!state.error.empty()) throw XmlParseError(state.error, XML_GetCurrentByteIndex(parser.get()));
    if (status == XML_STATUS_ERROR)
      throw XmlParseError(XML_ErrorString(XML_GetErrorCode(parser.get())), XML_GetCurrentByteIndex(parser.get()));
    if (final) break;
  }
}

std::string talk_subject(std::string_view title) {
  constexpr std::string_view prefix = "Talk:";
  if (title.size() > prefix.size() && title.substr(0, prefix.size()) == prefix) return std::string(title.substr(prefix.size()));
  return {};
}

std::vector<PageHistory> assemble_histories(std::vector<DumpPage> pages) {
  std::map<std::string, PageHistory> by_id;
  for (DumpPage& page : pages) {
    std::string subject = talk_subject(page.title);
    bool talk = !subject.empty();
    if (page.ns != -1 && page.ns != (talk ? 1 : 0)) continue;
    if (!talk) subject = page.title;
    PageHistory& h = by_id[subject];
    h.article_id = subject;
    auto& target = talk ? h.talk_revisions : h.main_revisions;
    for (Revision& rev : page.revisions) {
      rev.page_kind = talk ? PageKind::Talk : PageKind::Main;
      target.push_back(std::move(rev));
    }
  }

  std::vector<PageHistory> out;
  for (auto& [id, h] : by_id) {
    auto by_time = [](const Revision& a, const Revision& b) { return a.timestamp < b.timestamp; };
    std::stable_sort(h.main_revisions.begin(), h.main_revisions.end(), by_time);
    std::stable_sort(h.talk_revisions.begin(), h.talk_revisions.end(), by_time);
    if (h.main_revisions.empty() && h.talk_revisions.empty()) continue;
    if (h.main_revisions.empty()) h.creation_time = h.talk_revisions.front().timestamp;
    else if (h.talk_revisions.empty()) h.creation_time = h.main_revisions.front().timestamp;
    else h.creation_time = std::min(h.main_revisions.front().timestamp, h.talk_revisions.front().timestamp);
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<PageHistory> parse_mediawiki_xml(std::istream& in) {
  std::vector<DumpPage> pages;
  stream_mediawiki_xml(in, [&](DumpPage&& page) { pages.push_back(std::move(page)); });
  return assemble_histories(std::move(pages));
}

std::vector<PageHistory> parse_mediawiki_xml_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_mediawiki_xml(in);
}

}  // namespace qcpd

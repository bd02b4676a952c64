#include "qcpd/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace qcpd {

namespace {

std::string trim_lower(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

constexpr std::array<std::pair<std::string_view, RawClass>, 7> kRawNames = {{
    {"fa", RawClass::FA},
    {"a", RawClass::A},
    {"ga", RawClass::GA},
    {"b", RawClass::B},
    {"c", RawClass::C},
    {"start", RawClass::Start},
    {"stub", RawClass::Stub},
}};

}  // namespace

std::string_view to_string(PageKind kind) { return kind == PageKind::Main ? "main" : "talk"; }

PageKind parse_page_kind(std::string_view text) {
  if (text == "main") return PageKind::Main;
  if (text == "talk") return PageKind::Talk;
  throw std::invalid_argument("unknown page kind: " + std::string(text));
}

void PageHistory::validate() const {
  auto check = [&](const std::vector<Revision>& revs, std::string_view which) {
    for (std::size_t i = 0; i < revs.size(); ++i) {
      if (revs[i].editor_id.empty())
        throw std::invalid_argument(article_id + ": empty editor id in " + std::string(which) + " revision");
      if (i > 0 && revs[i].timestamp < revs[i - 1].timestamp)
        throw std::invalid_argument(article_id + ": " + std::string(which) + " revisions out of order");
      if (revs[i].timestamp < creation_time)
        throw std::invalid_argument(article_id + ": revision precedes creation time");
    }
  };
  check(main_revisions, "main");
  check(talk_revisions, "talk");
}

std::string_view to_string(QualityClass c) {
  switch (c) {
    case QualityClass::FA: return "FA";
    case QualityClass::AGA: return "AGA";
    case QualityClass::BC: return "BC";
    case QualityClass::SS: return "SS";
  }
  return "?";
}

std::string_view to_string(RawClass c) {
  switch (c) {
    case RawClass::FA: return "FA";
    case RawClass::A: return "A";
    case RawClass::GA: return "GA";
    case RawClass::B: return "B";
    case RawClass::C: return "C";
    case RawClass::Start: return "Start";
    case RawClass::Stub: return "Stub";
  }
  return "?";
}

std::optional<RawClass> try_parse_raw_class(std::string_view token) {
  std::string key = trim_lower(token);
  for (const auto& [name, value] : kRawNames)
    if (key == name) return value;
  return std::nullopt;
}

RawClass parse_raw_class(std::string_view token) {
  if (auto parsed = try_parse_raw_class(token)) return *parsed;
  throw UnknownClassError(std::string(token));
}

QualityClass parse_quality_class(std::string_view token) {
  for (QualityClass c : {QualityClass::FA, QualityClass::AGA, QualityClass::BC, QualityClass::SS})
    if (token == to_string(c)) return c;
  throw UnknownClassError(std::string(token));
}

QualityClass merge_quality_class(RawClass raw) {
  switch (raw) {
    case RawClass::FA: return QualityClass::FA;
    case RawClass::A:
    case RawClass::GA: return QualityClass::AGA;
    case RawClass::B:
    case RawClass::C: return QualityClass::BC;
    case RawClass::Start:
    case RawClass::Stub: return QualityClass::SS;
  }
  throw std::invalid_argument("invalid RawClass value");
}

QualityClass merge_quality_class(std::string_view raw) { return merge_quality_class(parse_raw_class(raw)); }

RawClass canonical_raw(QualityClass c) {
  switch (c) {
    case QualityClass::FA: return RawClass::FA;
    case QualityClass::AGA: return RawClass::GA;
    case QualityClass::BC: return RawClass::B;
    case QualityClass::SS: return RawClass::Start;
  }
  throw std::invalid_argument("invalid QualityClass value");
}

MonthCalendar::MonthCalendar(YearMonth start, int n_months) : start_(start), n_months_(n_months) {
  if (n_months < 2) throw std::invalid_argument("calendar needs at least 2 months");
}

MonthCalendar MonthCalendar::default_calendar() {
  YearMonth end{2019, 6};
  return MonthCalendar(end.plus_months(-(kDefaultMonths - 1)), kDefaultMonths);
}

std::optional<int> MonthCalendar::index_of(Instant t) const {
  int idx = raw_index_of(t);
  if (idx < 1 || idx > n_months_) return std::nullopt;
  return idx;
}

bool ChangePointSet::is_valid(int n) const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] <= 1 || points[i] > n) return false;
    if (i > 0 && points[i] <= points[i - 1]) return false;
  }
  return true;
}

ChangePointSet ChangePointSet::checked(std::vector<int> points, int n) {
  ChangePointSet set{std::move(points)};
  if (!set.is_valid(n))
    throw std::invalid_argument("change points must be strictly increasing within (1, " + std::to_string(n) + "]");
  return set;
}

std::vector<std::optional<Revision>> bin_monthly(std::span<const Revision> revisions, const MonthCalendar& cal,
                                                 std::optional<Instant> creation_time) {
  std::vector<std::optional<Revision>> out(cal.n_months());
  int first_valid = 1;
  if (creation_time) first_valid = std::max(1, cal.raw_index_of(*creation_time));
  for (const Revision& rev : revisions) {
    auto idx = cal.index_of(rev.timestamp);
    if (!idx || *idx < first_valid) continue;
    auto& slot = out[*idx - 1];
    if (!slot || rev.timestamp >= slot->timestamp) slot = rev;
  }
  return out;
}

std::vector<std::optional<Revision>> bin_monthly(const PageHistory& history, const MonthCalendar& cal) {
  return bin_monthly(history.main_revisions, cal, history.creation_time);
}

ChangePointSet ground_truth_changepoints(std::span<const QualityLabelEvent> events, const MonthCalendar& cal) {
  ChangePointSet out;
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].merged_class == events[i - 1].merged_class) continue;
    auto idx = cal.index_of(events[i].timestamp);
    if (!idx || *idx <= 1) continue;
    if (out.points.empty() || out.points.back() < *idx) out.points.push_back(*idx);
  }
  return out;
}

std::vector<std::optional<QualityClass>> monthly_classes(std::span<const QualityLabelEvent> events,
                                                         const MonthCalendar& cal) {
  std::vector<std::optional<QualityClass>> out(cal.n_months());
  std::size_t next = 0;
  std::optional<QualityClass> current;
  for (int m = 1; m <= cal.n_months(); ++m) {
    Instant end = cal.month_begin(m + 1);
    while (next < events.size() && events[next].timestamp < end) current = events[next++].merged_class;
    out[m - 1] = current;
  }
  return out;
}

}  // namespace qcpd

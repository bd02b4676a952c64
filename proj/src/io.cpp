#include "qcpd/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace qcpd {

namespace fs = std::filesystem;

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return value;
}

void expect_schema(const Json& doc, std::string_view expected) {
  if (!doc.is_object() || !doc.contains("schema") || doc["schema"] != expected)
    throw std::invalid_argument("expected schema " + std::string(expected));
}

namespace {

// JSONL records written by other tools may omit the schema tag.
void check_record_schema(const Json& rec, std::string_view expected) {
  if (rec.contains("schema")) expect_schema(rec, expected);
  else if (!rec.is_object()) throw std::invalid_argument("record is not an object");
}

template <typename F>
void for_each_line(std::istream& in, F&& f) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      f(Json::parse(line));
    } catch (const std::exception& e) {
      throw std::invalid_argument("line " + std::to_string(number) + ": " + e.what());
    }
  }
}

std::vector<int> int_list(const Json& j) {
  std::vector<int> out;
  for (const auto& v : j) out.push_back(v.get<int>());
  return out;
}

}  // namespace

// ------------------------------------------------------------ revisions

void write_revisions_jsonl(std::ostream& out, std::span<const PageHistory> histories) {
  for (const PageHistory& h : histories) {
    std::string created = format_timestamp(h.creation_time);
    for (const auto* list : {&h.main_revisions, &h.talk_revisions})
      for (const Revision& r : *list) {
        Json rec = {{"schema", kRevisionsSchema},
                    {"article_id", h.article_id},
                    {"ts", format_timestamp(r.timestamp)},
                    {"editor", r.editor_id},
                    {"registered", r.registered},
                    {"kind", to_string(r.page_kind)},
                    {"text", r.wikitext},
                    {"creation_time", created}};
        out << rec.dump() << '\n';
      }
  }
}

std::vector<PageHistory> read_revisions_jsonl(std::istream& in) {
  std::vector<PageHistory> out;
  std::map<std::string, std::size_t> index;
  std::vector<bool> has_creation;
  for_each_line(in, [&](const Json& rec) {
    check_record_schema(rec, kRevisionsSchema);
    std::string id = rec.at("article_id");
    auto [it, inserted] = index.try_emplace(id, out.size());
    if (inserted) {
      out.push_back(PageHistory{});
      out.back().article_id = id;
      has_creation.push_back(false);
    }
    PageHistory& h = out[it->second];
    Revision r;
    r.page_kind = parse_page_kind(rec.at("kind").get<std::string>());
    r.timestamp = parse_timestamp(rec.at("ts").get<std::string>());
    r.editor_id = rec.at("editor");
    r.registered = rec.at("registered");
    r.wikitext = rec.value("text", "");
    if (rec.contains("creation_time")) {
      Instant c = parse_timestamp(rec["creation_time"].get<std::string>());
      if (has_creation[it->second] && c != h.creation_time)
        throw std::invalid_argument(id + ": conflicting creation times");
      h.creation_time = c;
      has_creation[it->second] = true;
    }
    (r.page_kind == PageKind::Main ? h.main_revisions : h.talk_revisions).push_back(std::move(r));
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    PageHistory& h = out[i];
    if (!has_creation[i]) {
      // Earliest revision on either page.
      std::optional<Instant> first;
      for (const auto* list : {&h.main_revisions, &h.talk_revisions})
        if (!list->empty() && (!first || list->front().timestamp < *first)) first = list->front().timestamp;
      h.creation_time = *first;
    }
    h.validate();
  }
  return out;
}

// --------------------------------------------------------------- labels

void write_labels_jsonl(std::ostream& out, std::span<const ArticleLabels> labels) {
  for (const ArticleLabels& a : labels) {
    std::string created = format_timestamp(a.creation_time);
    for (const QualityLabelEvent& e : a.events) {
      Json rec = {{"schema", kLabelsSchema},
                  {"article_id", a.article_id},
                  {"ts", format_timestamp(e.timestamp)},
                  {"class", to_string(e.raw_class)},
                  {"merged_class", to_string(e.merged_class)},
                  {"creation_time", created}};
      out << rec.dump() << '\n';
    }
  }
}

std::vector<ArticleLabels> read_labels_jsonl(std::istream& in) {
  std::vector<ArticleLabels> out;
  std::map<std::string, std::size_t> index;
  for_each_line(in, [&](const Json& rec) {
    check_record_schema(rec, kLabelsSchema);
    std::string id = rec.at("article_id");
    auto event = QualityLabelEvent::make(parse_timestamp(rec.at("ts").get<std::string>()),
                                         parse_raw_class(rec.at("class").get<std::string>()));
    if (rec.contains("merged_class") && parse_quality_class(rec["merged_class"].get<std::string>()) != event.merged_class)
      throw std::invalid_argument(id + ": merged class disagrees with raw class");
    auto [it, inserted] = index.try_emplace(id, out.size());
    if (inserted) {
      out.push_back(ArticleLabels{id, event.timestamp, {}});
      if (!rec.contains("creation_time")) out.back().creation_time = event.timestamp;
    }
    ArticleLabels& a = out[it->second];
    if (rec.contains("creation_time")) a.creation_time = parse_timestamp(rec["creation_time"].get<std::string>());
    a.events.push_back(event);
  });
  return out;
}

// --------------------------------------------------------------- corpus

void write_series_csv(std::ostream& out, const ArticleSeries& series) {
  out << "month";
  for (std::size_t c = 0; c < series.matrix.cols(); ++c) out << ',' << feature_name(static_cast<int>(c));
  out << ",valid,is_change_point\n";
  std::size_t next_point = 0;
  for (std::size_t r = 0; r < series.matrix.rows(); ++r) {
    int month = static_cast<int>(r) + 1;
    bool change = next_point < series.ground_truth.size() && series.ground_truth.points[next_point] == month;
    if (change) ++next_point;
    out << month;
    for (double v : series.matrix.row(r)) out << ',' << format_double(v);
    out << ',' << (series.valid[r] ? 1 : 0) << ',' << (change ? 1 : 0) << '\n';
  }
}

void read_series_csv(std::istream& in, ArticleSeries& series) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty series file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split(line);
  if (header.size() < 4 || header[0] != "month" || header[header.size() - 2] != "valid" ||
      header.back() != "is_change_point")
    throw std::invalid_argument("series header must be month,F1..,valid,is_change_point");
  const std::size_t cols = header.size() - 3;
  series.matrix = Matrix(0, cols);
  series.valid.clear();
  series.ground_truth.points.clear();
  std::vector<double> row(cols);
  int expected_month = 1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != header.size()) throw std::invalid_argument("row " + std::to_string(expected_month) + " has the wrong width");
    if (std::stoi(cells[0]) != expected_month) throw std::invalid_argument("series months must be consecutive from 1");
    for (std::size_t c = 0; c < cols; ++c) row[c] = parse_double(cells[c + 1]);
    series.matrix.append_row(row);
    series.valid.push_back(cells[cols + 1] == "1");
    if (cells[cols + 2] == "1") series.ground_truth.points.push_back(expected_month);
    ++expected_month;
  }
}

void write_corpus(const fs::path& dir, std::span<const ArticleSeries> corpus) {
  fs::create_directories(dir);
  Json articles = Json::array();
  std::optional<MonthCalendar> calendar;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const ArticleSeries& s = corpus[i];
    if (!calendar) calendar = s.calendar;
    else if (!(*calendar == s.calendar)) throw std::invalid_argument("corpus articles must share one calendar");
    char name[32];
    std::snprintf(name, sizeof name, "a%06zu.csv", i + 1);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    write_series_csv(out, s);
    Json entry = {{"article_id", s.article_id}, {"file", name}, {"ground_truth", s.ground_truth.points}};
    entry["latest_class"] = s.latest_class ? Json(to_string(*s.latest_class)) : Json(nullptr);
    articles.push_back(std::move(entry));
  }
  MonthCalendar cal = calendar.value_or(MonthCalendar::default_calendar());
  Json manifest = {{"schema", kCorpusSchema},
                   {"calendar_start", cal.start().str()},
                   {"n_months", cal.n_months()},
                   {"articles", std::move(articles)}};
  write_json_file(dir / "manifest.json", manifest);
}

std::vector<ArticleSeries> read_corpus(const fs::path& dir) {
  Json manifest = read_json_file(dir / "manifest.json");
  expect_schema(manifest, kCorpusSchema);
  MonthCalendar cal(YearMonth::parse(manifest.at("calendar_start").get<std::string>()), manifest.at("n_months").get<int>());
  std::vector<ArticleSeries> out;
  for (const auto& entry : manifest.at("articles")) {
    ArticleSeries s;
    s.article_id = entry.at("article_id");
    s.calendar = cal;
    fs::path file = dir / entry.at("file").get<std::string>();
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    read_series_csv(in, s);
    if (entry.contains("ground_truth") && int_list(entry["ground_truth"]) != s.ground_truth.points)
      throw std::invalid_argument(s.article_id + ": manifest and CSV disagree on change points");
    if (!entry.at("latest_class").is_null())
      s.latest_class = parse_quality_class(entry["latest_class"].get<std::string>());
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

// ------------------------------------------------- truth and predictions

Json ground_truth_json(std::span<const ArticleSeries> corpus) {
  Json articles = Json::object();
  for (const ArticleSeries& s : corpus)
    articles[s.article_id] = {
        {"first_valid", s.first_valid()}, {"length", s.valid_length()}, {"points", s.ground_truth.points}};
  return {{"schema", kGroundTruthSchema}, {"articles", std::move(articles)}};
}

std::map<std::string, TruthEntry> parse_ground_truth(const Json& doc) {
  expect_schema(doc, kGroundTruthSchema);
  std::map<std::string, TruthEntry> out;
  for (const auto& [id, e] : doc.at("articles").items()) {
    TruthEntry t;
    t.first_valid = e.at("first_valid");
    t.length = e.at("length");
    t.points.points = int_list(e.at("points"));
    out[id] = std::move(t);
  }
  return out;
}

Json predictions_json(const PredictionSet& predictions) {
  Json points = Json::object();
  for (const auto& [id, set] : predictions.points) points[id] = set.points;
  return {{"schema", kPredictionsSchema}, {"metadata", predictions.metadata}, {"predictions", std::move(points)}};
}

PredictionSet parse_predictions(const Json& doc) {
  expect_schema(doc, kPredictionsSchema);
  PredictionSet out;
  if (doc.contains("metadata")) out.metadata = doc["metadata"];
  for (const auto& [id, pts] : doc.at("predictions").items()) out.points[id].points = int_list(pts);
  return out;
}

// --------------------------------------------------------------- report

Json report_json(const EvalReport& report) {
  Json rows = Json::array();
  for (const ArticleEval& a : report.articles)
    rows.push_back({{"article_id", a.article_id},
                    {"n", a.n},
                    {"covering", a.covering},
                    {"precision", a.precision},
                    {"recall", a.recall},
                    {"tp", a.tp},
                    {"fp", a.fp},
                    {"fn", a.fn}});
  return {{"schema", kReportSchema},
          {"label", report.label},
          {"margin", report.margin},
          {"articles_evaluated", report.articles.size()},
          {"mean", {{"covering", report.covering}, {"precision", report.precision}, {"recall", report.recall}}},
          {"totals", {{"tp", report.tp}, {"fp", report.fp}, {"fn", report.fn}}},
          {"articles", std::move(rows)}};
}

EvalReport parse_report(const Json& doc) {
  expect_schema(doc, kReportSchema);
  EvalReport r;
  r.label = doc.value("label", "");
  r.margin = doc.at("margin");
  r.covering = doc.at("mean").at("covering");
  r.precision = doc.at("mean").at("precision");
  r.recall = doc.at("mean").at("recall");
  r.tp = doc.at("totals").at("tp");
  r.fp = doc.at("totals").at("fp");
  r.fn = doc.at("totals").at("fn");
  for (const auto& a : doc.at("articles")) {
    ArticleEval e;
    e.article_id = a.at("article_id");
    e.n = a.at("n");
    e.covering = a.at("covering");
    e.precision = a.at("precision");
    e.recall = a.at("recall");
    e.tp = a.at("tp");
    e.fp = a.at("fp");
    e.fn = a.at("fn");
    r.articles.push_back(std::move(e));
  }
  return r;
}

// ----------------------------------------------------------------- files

Json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const Json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace qcpd

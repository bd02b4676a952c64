#include "qcpd/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <functional>
#include <stdexcept>
#include <unordered_set>

#include "qcpd/readability.hpp"

namespace qcpd {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kDescriptions = {
    "distinct registered editors on talk page",
    "new registered editors on talk page",
    "distinct unregistered editors on talk page",
    "distinct registered editors on main page",
    "new registered editors on main page",
    "distinct unregistered editors on main page",
    "mean days between consecutive main revisions",
    "variance of days between consecutive main revisions",
    "mean days between consecutive talk revisions",
    "variance of days between consecutive talk revisions",
    "talk revisions per month",
    "talk revisions per week",
    "main revisions per month",
    "main revisions per week",
    "article length in bytes",
    "references",
    "categories",
    "links to other articles",
    "citation templates",
    "non-citation templates",
    "images per byte",
    "infobox present",
    "level 2 headings",
    "level 3+ headings",
    "information-to-noise ratio",
    "Flesch reading ease",
    "Flesch-Kincaid grade",
    "automated readability index",
    "Coleman-Liau index",
    "Gunning fog index",
    "SMOG index",
    "difficult words",
    "Dale-Chall score",
    "Linsear write",
};

struct MonthWindow {
  Instant begin;
  Instant end;
  bool contains(Instant t) const { return t >= begin && t < end; }
};

MonthWindow window_of(const MonthCalendar& cal, int month) {
  if (month < 1 || month > cal.n_months()) throw std::out_of_range("month outside calendar");
  return {cal.month_begin(month), cal.month_begin(month + 1)};
}

// Distinct registered, new registered and distinct unregistered editors.
std::array<double, 3> editor_counts(std::span<const Revision> revs, MonthWindow w) {
  std::unordered_set<std::string> before, registered, unregistered;
  for (const auto& r : revs) {
    if (r.timestamp < w.begin) {
      before.insert(r.editor_id);
    } else if (w.contains(r.timestamp)) {
      (r.registered ? registered : unregistered).insert(r.editor_id);
    }
  }
  long fresh = 0;
  for (const auto& e : registered)
    if (!before.contains(e)) ++fresh;
  return {static_cast<double>(registered.size()), static_cast<double>(fresh),
          static_cast<double>(unregistered.size())};
}

// Mean and population variance of gaps whose later revision falls in the
// month, plus the month's revision count.
std::array<double, 3> gap_stats(std::span<const Revision> revs, MonthWindow w) {
  std::vector<double> gaps;
  long count = 0;
  for (std::size_t i = 0; i < revs.size(); ++i) {
    if (!w.contains(revs[i].timestamp)) continue;
    ++count;
    if (i > 0) gaps.push_back(days_between(revs[i - 1].timestamp, revs[i].timestamp));
  }
  double mean = 0.0, var = 0.0;
  if (gaps.size() >= 2) {
    for (double g : gaps) mean += g;
    mean /= static_cast<double>(gaps.size());
    for (double g : gaps) var += (g - mean) * (g - mean);
    var /= static_cast<double>(gaps.size());
  }
  return {mean, var, static_cast<double>(count)};
}

}  // namespace

std::string feature_name(int column) { return "F" + std::to_string(column + 1); }

std::string_view feature_description(int column) { return kDescriptions.at(static_cast<std::size_t>(column)); }

std::array<double, 6> contribution_features(const PageHistory& history, const MonthCalendar& cal, int month) {
  MonthWindow w = window_of(cal, month);
  auto talk = editor_counts(history.talk_revisions, w);
  auto main = editor_counts(history.main_revisions, w);
  return {talk[0], talk[1], talk[2], main[0], main[1], main[2]};
}

std::array<double, 8> activity_features(const PageHistory& history, const MonthCalendar& cal, int month) {
  MonthWindow w = window_of(cal, month);
  auto main = gap_stats(history.main_revisions, w);
  auto talk = gap_stats(history.talk_revisions, w);
  double weeks = static_cast<double>(cal.days_in_month(month)) / 7.0;
  return {main[0], main[1], talk[0], talk[1], talk[2], talk[2] / weeks, main[2], main[2] / weeks};
}

std::array<double, 11> content_features(const MarkerCounts& m, std::string_view plain_text) {
  auto d = [](long v) { return static_cast<double>(v); };
  return {d(m.byte_length),
          d(m.refs),
          d(m.categories),
          d(m.wikilinks),
          d(m.citation_templates),
          d(m.noncitation_templates),
          m.byte_length > 0 ? d(m.images) / d(m.byte_length) : 0.0,
          m.has_infobox ? 1.0 : 0.0,
          d(m.level2_headings),
          d(m.level3plus_headings),
          information_noise_score(plain_text)};
}

std::array<double, 20> snapshot_features(std::string_view wikitext) {
  std::string plain = wikitext_to_plain(wikitext);
  auto content = content_features(parse_wikitext_markers(wikitext), plain);
  auto readability = readability_features(plain);
  std::array<double, 20> out{};
  std::copy(content.begin(), content.end(), out.begin());
  std::copy(readability.begin(), readability.end(), out.begin() + 11);
  return out;
}

int ArticleSeries::first_valid() const {
  for (std::size_t i = 0; i < valid.size(); ++i)
    if (valid[i]) return static_cast<int>(i) + 1;
  return calendar.n_months() + 1;
}

int ArticleSeries::valid_length() const {
  return static_cast<int>(std::count(valid.begin(), valid.end(), true));
}

void ArticleSeries::validate() const {
  const auto n = static_cast<std::size_t>(calendar.n_months());
  if (matrix.rows() != n || valid.size() != n)
    throw std::invalid_argument(article_id + ": series rows do not match the calendar");
  int first = first_valid();
  int len = valid_length();
  for (int m = first; m < first + len; ++m)
    if (!valid[static_cast<std::size_t>(m - 1)])
      throw std::invalid_argument(article_id + ": valid months must be contiguous");
  if (!ground_truth.is_valid(calendar.n_months()))
    throw std::invalid_argument(article_id + ": malformed ground truth");
  for (int q : ground_truth.points)
    if (q <= first || q >= first + len)
      throw std::invalid_argument(article_id + ": ground truth outside the valid months");
  for (double v : matrix.data())
    if (!std::isfinite(v)) throw std::invalid_argument(article_id + ": non-finite feature value");
}

Matrix ArticleSeries::detection_input(std::span<const int> columns) const {
  std::vector<int> all;
  if (columns.empty()) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) all.push_back(static_cast<int>(c));
    columns = all;
  }
  for (int c : columns)
    if (c < 0 || static_cast<std::size_t>(c) >= matrix.cols())
      throw std::invalid_argument(article_id + ": feature column out of range");
  auto first = static_cast<std::size_t>(first_valid() - 1);
  return matrix.select(first, first + static_cast<std::size_t>(valid_length()), columns);
}

ChangePointSet ArticleSeries::to_local(const ChangePointSet& calendar_points) const {
  ChangePointSet out;
  int first = first_valid();
  int len = valid_length();
  for (int q : calendar_points.points) {
    int local = q - first + 1;
    if (local > 1 && local <= len) out.points.push_back(local);
  }
  return out;
}

ChangePointSet ArticleSeries::to_calendar(const ChangePointSet& local_points) const {
  ChangePointSet out;
  int offset = first_valid() - 1;
  for (int q : local_points.points) out.points.push_back(q + offset);
  return out;
}

ArticleSeries build_series(const PageHistory& history, std::span<const QualityLabelEvent> labels,
                           const MonthCalendar& cal) {
  history.validate();
  if (history.main_revisions.empty())
    throw std::invalid_argument(history.article_id + ": no main-page revisions");

  ArticleSeries s;
  s.article_id = history.article_id;
  s.calendar = cal;
  s.matrix = Matrix(static_cast<std::size_t>(cal.n_months()), kFeatureCount);
  s.valid.assign(static_cast<std::size_t>(cal.n_months()), false);

  const int first = std::max(1, cal.raw_index_of(history.creation_time));
  auto latest = bin_monthly(history, cal);
  std::array<double, 20> snapshot{};
  // Content written before the window carries into its first month.
  const Revision* before = nullptr;
  for (const Revision& rev : history.main_revisions)
    if (rev.timestamp < cal.month_begin(1)) before = &rev;
  if (before) snapshot = snapshot_features(before->wikitext);
  for (int m = first; m <= cal.n_months(); ++m) {
    auto row = s.matrix.row(static_cast<std::size_t>(m - 1));
    s.valid[static_cast<std::size_t>(m - 1)] = true;
    auto gc = contribution_features(history, cal, m);
    auto ga = activity_features(history, cal, m);
    if (const auto& rev = latest[static_cast<std::size_t>(m - 1)]) snapshot = snapshot_features(rev->wikitext);
    std::copy(gc.begin(), gc.end(), row.begin());
    std::copy(ga.begin(), ga.end(), row.begin() + 6);
    std::copy(snapshot.begin(), snapshot.end(), row.begin() + 14);
  }

  for (int q : ground_truth_changepoints(labels, cal).points)
    if (q > first) s.ground_truth.points.push_back(q);
  if (!labels.empty()) s.latest_class = labels.back().merged_class;
  return s;
}

FeatureGroup feature_group(std::string_view name) {
  auto range = [](int lo, int hi) {  // 1-based inclusive feature numbers
    std::vector<int> v;
    for (int f = lo; f <= hi; ++f) v.push_back(f - 1);
    return v;
  };
  auto base = [&](std::string_view n) -> std::vector<int> {
    if (n == "Gc") return range(1, 6);
    if (n == "Ga") return range(7, 14);
    if (n == "Gp") return range(15, 34);
    if (n == "all") return range(1, 34);
    if (n == "G1") return range(26, 34);
    if (n == "G2") return range(15, 25);
    if (n == "G4") {
      auto v = range(15, 21);
      v.push_back(22);
      v.push_back(23);
      return v;
    }
    if (n == "G6") return range(9, 14);
    throw std::invalid_argument("unknown feature group: " + std::string(n));
  };
  std::function<std::vector<int>(std::string_view)> resolve = [&](std::string_view n) -> std::vector<int> {
    if (n == "G3" || n == "G5" || n == "G7") {
      auto v = base(n == "G3" ? "G2" : n == "G5" ? "G4" : "G6");
      v.push_back(31);
      return v;
    }
    if (n == "G8") {
      auto v = resolve("G7");
      auto c = range(1, 6);
      v.insert(v.end(), c.begin(), c.end());
      return v;
    }
    return base(n);
  };

  std::set<int> columns;
  std::size_t start = 0;
  while (start <= name.size()) {
    std::size_t plus = name.find('+', start);
    std::string_view part = name.substr(start, plus == std::string_view::npos ? std::string_view::npos : plus - start);
    if (part.empty()) throw std::invalid_argument("empty feature group in: " + std::string(name));
    for (int c : resolve(part)) columns.insert(c);
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  return {std::string(name), std::vector<int>(columns.begin(), columns.end())};
}

CorrelationResult correlation_matrix(std::span<const ArticleSeries> corpus) {
  if (corpus.size() < 2) throw std::invalid_argument("correlation needs at least two articles");
  const MonthCalendar& cal = corpus.front().calendar;
  const std::size_t d = corpus.front().matrix.cols();
  for (const auto& s : corpus)
    if (!(s.calendar == cal) || s.matrix.cols() != d)
      throw std::invalid_argument("correlation needs a shared calendar and feature width");

  // Per-month averages over the articles valid in that month.
  std::vector<std::vector<double>> series(d);
  for (int m = 1; m <= cal.n_months(); ++m) {
    std::vector<double> sum(d, 0.0);
    int n = 0;
    for (const auto& s : corpus) {
      if (!s.valid[static_cast<std::size_t>(m - 1)]) continue;
      auto row = s.matrix.row(static_cast<std::size_t>(m - 1));
      for (std::size_t k = 0; k < d; ++k) sum[k] += row[k];
      ++n;
    }
    if (n == 0) continue;
    for (std::size_t k = 0; k < d; ++k) series[k].push_back(sum[k] / n);
  }

  CorrelationResult out;
  out.timestamps = series.empty() ? 0 : static_cast<int>(series[0].size());
  out.r = Matrix(d, d);
  std::vector<double> mean(d, 0.0), norm(d, 0.0);
  const double t = static_cast<double>(out.timestamps);
  for (std::size_t k = 0; k < d; ++k) {
    for (double v : series[k]) mean[k] += v;
    if (t > 0) mean[k] /= t;
    for (double v : series[k]) norm[k] += (v - mean[k]) * (v - mean[k]);
    norm[k] = std::sqrt(norm[k]);
    bool constant = norm[k] <= 1e-12 * (1.0 + std::abs(mean[k])) * std::sqrt(std::max(t, 1.0));
    if (constant) out.zero_variance.push_back(static_cast<int>(k));
  }
  auto is_constant = [&](std::size_t k) {
    return std::find(out.zero_variance.begin(), out.zero_variance.end(), static_cast<int>(k)) !=
           out.zero_variance.end();
  };
  for (std::size_t a = 0; a < d; ++a) {
    out.r(a, a) = 1.0;
    for (std::size_t b = a + 1; b < d; ++b) {
      double r = 0.0;
      if (!is_constant(a) && !is_constant(b)) {
        double cov = 0.0;
        for (std::size_t i = 0; i < series[a].size(); ++i) cov += (series[a][i] - mean[a]) * (series[b][i] - mean[b]);
        r = std::clamp(cov / (norm[a] * norm[b]), -1.0, 1.0);
      }
      out.r(a, b) = out.r(b, a) = r;
    }
  }
  return out;
}

WindowMeans change_window_means(std::span<const ArticleSeries> corpus, int window,
                                std::span<const std::optional<int>> anchors) {
  if (window < 2) throw std::invalid_argument("window must be at least 2 months");
  if (!anchors.empty() && anchors.size() != corpus.size())
    throw std::invalid_argument("one anchor per article expected");
  WindowMeans out;
  out.window = window;
  out.change_index = window / 2;
  const std::size_t d = corpus.empty() ? kFeatureCount : corpus.front().matrix.cols();
  out.means = Matrix(static_cast<std::size_t>(window), d);

  for (std::size_t a = 0; a < corpus.size(); ++a) {
    const auto& s = corpus[a];
    std::optional<int> anchor = anchors.empty() ? std::nullopt : anchors[a];
    if (anchors.empty() && !s.ground_truth.empty()) anchor = s.ground_truth.points.front();
    int lo = anchor ? *anchor - out.change_index : 0;
    int hi = lo + window - 1;
    bool ok = anchor && s.matrix.cols() == d && lo >= 1 && hi <= s.calendar.n_months();
    for (int m = lo; ok && m <= hi; ++m) ok = s.valid[static_cast<std::size_t>(m - 1)];
    if (!ok) {
      out.skipped.push_back(s.article_id);
      continue;
    }
    for (int p = 0; p < window; ++p) {
      auto row = s.matrix.row(static_cast<std::size_t>(lo + p - 1));
      for (std::size_t k = 0; k < d; ++k) out.means(static_cast<std::size_t>(p), k) += row[k];
    }
    out.used.push_back(s.article_id);
  }
  if (!out.used.empty()) {
    const double n = static_cast<double>(out.used.size());
    for (std::size_t p = 0; p < out.means.rows(); ++p)
      for (std::size_t k = 0; k < d; ++k) out.means(p, k) /= n;
  }
  return out;
}

}  // namespace qcpd

#pragma once

// Independent reference implementations and random generators used by the
// unit and acceptance tests. Nothing here calls into the code under test
// except for plain data types.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcpd/matrix.hpp"
#include "qcpd/model.hpp"
#include "qcpd/rng.hpp"
#include "qcpd/trajectory.hpp"
#include "qcpd/wikitext.hpp"

namespace oracle {

using qcpd::Matrix;
using qcpd::QualityClass;

// Kernel cost of rows [begin, end) by direct double summation.
inline double rbf_cost(const Matrix& y, std::size_t begin, std::size_t end, double gamma) {
  double n = static_cast<double>(end - begin);
  double s = 0.0;
  for (std::size_t a = begin; a < end; ++a)
    for (std::size_t b = begin; b < end; ++b) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < y.cols(); ++k) {
        double d = y(a, k) - y(b, k);
        d2 += d * d;
      }
      s += std::exp(-gamma * d2);
    }
  return n - s / n;
}

inline double l2_cost(const Matrix& y, std::size_t begin, std::size_t end) {
  double total = 0.0;
  for (std::size_t k = 0; k < y.cols(); ++k) {
    double mean = 0.0;
    for (std::size_t r = begin; r < end; ++r) mean += y(r, k);
    mean /= static_cast<double>(end - begin);
    for (std::size_t r = begin; r < end; ++r) total += (y(r, k) - mean) * (y(r, k) - mean);
  }
  return total;
}

// Lower median of pairwise squared distances, recomputed from scratch.
inline double median_gamma(const Matrix& y) {
  std::vector<double> d;
  for (std::size_t a = 0; a < y.rows(); ++a)
    for (std::size_t b = a + 1; b < y.rows(); ++b) d.push_back(qcpd::squared_distance(y.row(a), y.row(b)));
  if (d.empty()) return 1.0;
  std::sort(d.begin(), d.end());
  double m = d[(d.size() - 1) / 2];
  return m > 0.0 ? 1.0 / m : 1.0;
}

// Every segmentation with at most `max_breaks` points (1-based first index of
// each new segment); calls fn(points, penalized cost).
inline void enumerate_segmentations(int n, int max_breaks, const std::function<double(int, int)>& seg_cost, double pen,
                                    const std::function<void(const std::vector<int>&, double)>& fn) {
  std::vector<int> pts;
  std::function<void(int)> rec = [&](int from) {
    double c = 0.0;
    int start = 1;
    for (int p : pts) {
      c += seg_cost(start, p);
      start = p;
    }
    c += seg_cost(start, n + 1) + pen * static_cast<double>(pts.size());
    fn(pts, c);
    if (static_cast<int>(pts.size()) == max_breaks) return;
    for (int q = from; q <= n; ++q) {
      pts.push_back(q);
      rec(q + 1);
      pts.pop_back();
    }
  };
  rec(2);
}

// Maximum-cardinality matching between ground-truth and predicted points with
// |g - q| <= margin (augmenting paths).
inline int max_matching(const std::vector<int>& gt, const std::vector<int>& pred, int margin) {
  std::vector<int> owner(pred.size(), -1);
  std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t g, std::vector<bool>& seen) {
    for (std::size_t q = 0; q < pred.size(); ++q) {
      if (std::abs(gt[g] - pred[q]) > margin || seen[q]) continue;
      seen[q] = true;
      if (owner[q] < 0 || augment(static_cast<std::size_t>(owner[q]), seen)) {
        owner[q] = static_cast<int>(g);
        return true;
      }
    }
    return false;
  };
  int size = 0;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    std::vector<bool> seen(pred.size(), false);
    if (augment(g, seen)) ++size;
  }
  return size;
}

struct BruteSwitch {
  std::vector<QualityClass> classes;
  std::size_t i = 0;
  std::size_t j = 0;
};

// Cyclic switches by exhaustive search: collapse repeats, then for every start
// i try every end j and accept the first j whose whole path has distinct
// neighbours and whose interior avoids the start class.
inline std::vector<BruteSwitch> cyclic_switches(const std::vector<QualityClass>& raw) {
  std::vector<QualityClass> seq;
  for (QualityClass c : raw)
    if (seq.empty() || seq.back() != c) seq.push_back(c);
  std::vector<BruteSwitch> out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    for (std::size_t j = i + 2; j < seq.size(); ++j) {
      bool ok = seq[i] == seq[j];
      for (std::size_t k = i; ok && k < j; ++k) ok = seq[k] != seq[k + 1];
      for (std::size_t k = i + 1; ok && k < j; ++k) ok = seq[k] != seq[i];
      if (ok) {
        out.push_back({std::vector<QualityClass>(seq.begin() + static_cast<long>(i), seq.begin() + static_cast<long>(j) + 1), i, j});
        break;
      }
    }
  }
  return out;
}

// Reference wikitext scanner for well-formed snippets: a recursive-descent
// parse into a tree of templates and links followed by a tree walk.
class WikiScanner {
 public:
  explicit WikiScanner(std::string_view text) : t_(text) {}

  qcpd::MarkerCounts run() {
    c_ = {};
    c_.byte_length = static_cast<long>(t_.size());
    std::size_t pos = 0;
    parse(pos, "", 0, true);
    return c_;
  }

 private:
  static std::string lower(std::string_view s) {
    std::string out(s);
    for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
  }
  static std::string strip(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
  }
  static bool starts_ci(std::string_view s, std::string_view p) {
    return s.size() >= p.size() && lower(s.substr(0, p.size())) == p;
  }

  void heading(std::size_t pos) {
    std::size_t nl = t_.find('\n', pos);
    std::string line = strip(t_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    std::size_t lead = line.find_first_not_of('=');
    std::size_t last = line.find_last_not_of('=');
    if (lead == std::string::npos || lead == 0) return;
    std::size_t tail = line.size() - 1 - last;
    if (tail == 0) return;
    std::size_t level = std::min(lead, tail);
    if (level == 2) ++c_.level2_headings;
    else if (level >= 3) ++c_.level3plus_headings;
  }

  void link(std::string_view inner) {
    std::string target = strip(inner.substr(0, inner.find('|')));
    bool colon_first = !target.empty() && target[0] == ':';
    if (colon_first) target = strip(target.substr(1));
    std::size_t colon = target.find(':');
    if (colon == std::string::npos) {
      ++c_.wikilinks;
      return;
    }
    std::string ns = lower(strip(target.substr(0, colon)));
    if (!colon_first && ns == "category") ++c_.categories;
    else if (!colon_first && (ns == "file" || ns == "image")) ++c_.images;
  }

  void tmpl(std::string_view head, int template_depth) {
    std::string name = strip(head);
    if (starts_ci(name, "template:")) name = strip(name.substr(9));
    if (name.empty() || name[0] == '#' || name.find(':') != std::string::npos) return;
    if (starts_ci(name, "infobox")) c_.has_infobox = true;
    else if (starts_ci(name, "cite") || starts_ci(name, "citation")) ++c_.citation_templates;
    else if (template_depth == 0) ++c_.noncitation_templates;
  }

  // Parses until `close` (or end of text at the outermost level). Returns the
  // text before the first top-level '|' seen at this level.
  std::string parse(std::size_t& pos, std::string_view close, int template_depth, bool outermost) {
    std::string head;
    bool head_done = false;
    while (pos < t_.size()) {
      if (outermost && (pos == 0 || t_[pos - 1] == '\n') && t_[pos] == '=') heading(pos);
      std::string_view rest = t_.substr(pos);
      if (!close.empty() && rest.substr(0, close.size()) == close) {
        pos += close.size();
        return head;
      }
      if (rest.substr(0, 4) == "<!--") {
        std::size_t e = t_.find("-->", pos);
        pos = e == std::string_view::npos ? t_.size() : e + 3;
      } else if (starts_ci(rest, "<ref") && rest.size() > 4 &&
                 (rest[4] == '>' || rest[4] == '/' || rest[4] == ' ')) {
        ++c_.refs;
        pos = t_.find('>', pos) + 1;
      } else if (rest.substr(0, 2) == "{{") {
        pos += 2;
        std::string inner_head = parse(pos, "}}", template_depth + 1, false);
        tmpl(inner_head, template_depth);
        head_done = head_done || !close.empty();
      } else if (rest.substr(0, 2) == "[[") {
        std::size_t start = pos + 2;
        pos += 2;
        parse(pos, "]]", template_depth, false);
        link(t_.substr(start, pos - 2 - start));
      } else if (rest[0] == '[' && (starts_ci(rest.substr(1), "http://") || starts_ci(rest.substr(1), "https://"))) {
        std::size_t e = rest.find_first_of("]\n");
        if (e != std::string_view::npos && rest[e] == ']') ++c_.external_links;
        ++pos;
      } else {
        if (rest[0] == '|') head_done = true;
        if (!head_done) head.push_back(rest[0]);
        ++pos;
      }
    }
    return head;
  }

  std::string_view t_;
  qcpd::MarkerCounts c_;
};

inline qcpd::MarkerCounts scan_markers(std::string_view text) { return WikiScanner(text).run(); }

// ---------------------------------------------------------------- generators

inline Matrix random_matrix(qcpd::Rng& rng, std::size_t n, std::size_t d, double scale = 1.0) {
  Matrix m(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < d; ++k) m(r, k) = scale * rng.normal();
  return m;
}

// Piecewise-constant means plus noise, with a random number of random breaks.
inline Matrix random_piecewise(qcpd::Rng& rng, std::size_t n, std::size_t d) {
  Matrix m(n, d);
  std::size_t regimes = 1 + static_cast<std::size_t>(rng.below(4));
  std::vector<double> level(d);
  std::size_t next_break = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r == next_break) {
      for (double& l : level) l = 3.0 * rng.normal();
      next_break = r + 1 + static_cast<std::size_t>(rng.below(std::max<std::size_t>(1, n / regimes)));
    }
    for (std::size_t k = 0; k < d; ++k) m(r, k) = level[k] + 0.5 * rng.normal();
  }
  return m;
}

inline qcpd::Instant instant(int y, int mo, int d, int h = 0, int mi = 0, int s = 0) {
  using namespace std::chrono;
  return sys_days(year{y} / mo / d) + hours{h} + minutes{mi} + seconds{s};
}

// Random page history with a small editor pool, IP editors and revisions
// spread over the default calendar window.
inline qcpd::PageHistory random_history(qcpd::Rng& rng, const std::string& id) {
  static const char* kWords[] = {"alpha", "history", "the",     "river",  "[[Paris]]", "{{cite web|url=x}}",
                                 "of",    "<ref>r</ref>", "museum", "and", "'''bold'''", "\n== Section ==\n",
                                 "city",  "{{Infobox place}}", "[[Category:Towns]]", "population", "."};
  qcpd::PageHistory h;
  h.article_id = id;
  qcpd::Instant start = instant(2006, 7, 1) + std::chrono::seconds(rng.below(86400LL * 365 * 10));
  h.creation_time = start;
  auto make = [&](qcpd::PageKind kind, int count) {
    std::vector<qcpd::Revision> out;
    qcpd::Instant t = start;
    for (int i = 0; i < count; ++i) {
      t += std::chrono::seconds(rng.below(86400LL * 40));
      qcpd::Revision r;
      r.timestamp = t;
      r.page_kind = kind;
      r.registered = rng.below(4) != 0;
      r.editor_id = r.registered ? "user" + std::to_string(rng.below(6)) : "10.0.0." + std::to_string(rng.below(4));
      int words = static_cast<int>(rng.below(40));
      for (int w = 0; w < words; ++w) {
        r.wikitext += kWords[rng.below(std::size(kWords))];
        r.wikitext += ' ';
      }
      out.push_back(std::move(r));
    }
    return out;
  };
  h.main_revisions = make(qcpd::PageKind::Main, 1 + static_cast<int>(rng.below(30)));
  h.talk_revisions = make(qcpd::PageKind::Talk, static_cast<int>(rng.below(12)));
  return h;
}

inline std::vector<QualityClass> random_classes(qcpd::Rng& rng, std::size_t max_len) {
  std::size_t len = 1 + static_cast<std::size_t>(rng.below(max_len));
  std::vector<QualityClass> out;
  for (std::size_t i = 0; i < len; ++i) out.push_back(static_cast<QualityClass>(rng.below(4)));
  return out;
}

inline qcpd::QualityTrajectory trajectory_of(const std::vector<QualityClass>& classes, qcpd::Rng& rng) {
  qcpd::QualityTrajectory t;
  t.article_id = "t";
  qcpd::Instant at = instant(2010, 1, 1);
  t.creation_time = at;
  for (QualityClass c : classes) {
    at += std::chrono::hours(1 + static_cast<long>(rng.below(24 * 60)));
    t.labeled.push_back({at, c});
  }
  return t;
}

}  // namespace oracle

#include "qcpd/evaluation.hpp"

#include <algorithm>
#include <cstdlib>
#include <iterator>
#include <optional>
#include <stdexcept>

namespace qcpd {

double jaccard(std::span<const int> a, std::span<const int> b) {
  std::vector<int> x(a.begin(), a.end());
  std::vector<int> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  std::sort(y.begin(), y.end());
  y.erase(std::unique(y.begin(), y.end()), y.end());
  if (x.empty() && y.empty()) return 1.0;
  std::vector<int> common;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
  double inter = static_cast<double>(common.size());
  return inter / (static_cast<double>(x.size() + y.size()) - inter);
}

std::vector<Segment> partition(const ChangePointSet& points, int n) {
  if (n < 1) throw std::invalid_argument("partition needs n >= 1");
  if (!points.is_valid(n)) throw std::invalid_argument("invalid change point set for partition");
  std::vector<Segment> out;
  int start = 1;
  for (int q : points.points) {
    out.push_back({start, q - 1});
    start = q;
  }
  out.push_back({start, n});
  return out;
}

std::string_view to_string(CoveringOp op) { return op == CoveringOp::Max ? "max" : "min"; }

CoveringOp parse_covering_op(std::string_view text) {
  if (text == "max") return CoveringOp::Max;
  if (text == "min") return CoveringOp::Min;
  throw std::invalid_argument("covering op must be max or min");
}

namespace {

double interval_jaccard(const Segment& s, const Segment& t) {
  int overlap = std::max(0, std::min(s.last, t.last) - std::max(s.first, t.first) + 1);
  return static_cast<double>(overlap) / static_cast<double>(s.size() + t.size() - overlap);
}

}  // namespace

double covering(const ChangePointSet& gt, const ChangePointSet& pred, int n, CoveringOp op) {
  auto gs = partition(gt, n);
  auto ps = partition(pred, n);
  double total = 0.0;
  for (const Segment& s : gs) {
    double best = op == CoveringOp::Max ? 0.0 : 1.0;
    for (const Segment& t : ps) {
      double j = interval_jaccard(s, t);
      best = op == CoveringOp::Max ? std::max(best, j) : std::min(best, j);
    }
    total += s.size() * best;
  }
  return total / n;
}

std::vector<Match> match_true_positives(const ChangePointSet& gt, const ChangePointSet& pred, int margin) {
  if (margin < 0) throw std::invalid_argument("margin must be nonnegative");
  std::vector<int> g = gt.points;
  std::sort(g.begin(), g.end());
  std::vector<int> q = pred.points;
  std::sort(q.begin(), q.end());
  // Some optimal matching on a line never crosses, so a prefix DP suffices.
  // Score: most pairs first, then least total distance.
  struct Score {
    int pairs = 0;
    long long dist = 0;
    bool operator<(const Score& o) const { return pairs != o.pairs ? pairs < o.pairs : dist > o.dist; }
  };
  const std::size_t G = g.size(), Q = q.size();
  std::vector<Score> dp((G + 1) * (Q + 1));
  auto at = [&](std::size_t i, std::size_t j) -> Score& { return dp[i * (Q + 1) + j]; };
  auto paired = [&](std::size_t i, std::size_t j) {
    int d = std::abs(g[i - 1] - q[j - 1]);
    if (d > margin) return std::optional<Score>{};
    Score s = at(i - 1, j - 1);
    ++s.pairs;
    s.dist += d;
    return std::optional<Score>{s};
  };
  for (std::size_t i = 1; i <= G; ++i)
    for (std::size_t j = 1; j <= Q; ++j) {
      Score best = std::max(at(i - 1, j), at(i, j - 1));
      if (auto s = paired(i, j); s && best < *s) best = *s;
      at(i, j) = best;
    }
  // Walking back, dropping the larger prediction on ties keeps the smaller one.
  std::vector<Match> out;
  std::size_t i = G, j = Q;
  while (i > 0 && j > 0) {
    const Score& cur = at(i, j);
    if (!(at(i, j - 1) < cur)) {
      --j;
    } else if (auto s = paired(i, j); s && !(*s < cur)) {
      out.push_back({g[i - 1], q[j - 1]});
      --i;
      --j;
    } else {
      --i;
    }
  }
  std::reverse(out.begin(), out.end());
  return out;
}

PrecisionRecall precision_recall(const ChangePointSet& gt, const ChangePointSet& pred, int margin) {
  PrecisionRecall pr;
  pr.tp = static_cast<int>(match_true_positives(gt, pred, margin).size());
  pr.fp = static_cast<int>(pred.size()) - pr.tp;
  pr.fn = static_cast<int>(gt.size()) - pr.tp;
  if (gt.empty() && pred.empty()) {
    pr.precision = pr.recall = 1.0;
    return pr;
  }
  pr.precision = pred.empty() ? 0.0 : static_cast<double>(pr.tp) / static_cast<double>(pred.size());
  pr.recall = gt.empty() ? 1.0 : static_cast<double>(pr.tp) / static_cast<double>(gt.size());
  return pr;
}

ChangePointSet labels_to_changepoints(std::span<const QualityClass> classes) {
  ChangePointSet out;
  for (std::size_t m = 1; m < classes.size(); ++m)
    if (classes[m] != classes[m - 1]) out.points.push_back(static_cast<int>(m) + 1);
  return out;
}

ArticleEval evaluate_article(std::string article_id, const ChangePointSet& gt, const ChangePointSet& pred, int n,
                             int margin, CoveringOp op) {
  ArticleEval row;
  row.article_id = std::move(article_id);
  row.n = n;
  row.covering = covering(gt, pred, n, op);
  auto pr = precision_recall(gt, pred, margin);
  row.precision = pr.precision;
  row.recall = pr.recall;
  row.tp = pr.tp;
  row.fp = pr.fp;
  row.fn = pr.fn;
  return row;
}

EvalReport aggregate_report(std::vector<ArticleEval> articles, int margin, std::string label) {
  if (articles.empty()) throw std::invalid_argument("aggregate_report needs at least one article");
  std::stable_sort(articles.begin(), articles.end(),
                   [](const ArticleEval& a, const ArticleEval& b) { return a.article_id < b.article_id; });
  EvalReport report;
  report.label = std::move(label);
  report.margin = margin;
  for (const ArticleEval& row : articles) {
    report.covering += row.covering;
    report.precision += row.precision;
    report.recall += row.recall;
    report.tp += row.tp;
    report.fp += row.fp;
    report.fn += row.fn;
  }
  double count = static_cast<double>(articles.size());
  report.covering /= count;
  report.precision /= count;
  report.recall /= count;
  report.articles = std::move(articles);
  return report;
}

}  // namespace qcpd

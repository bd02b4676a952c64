#pragma once

// Segmentation quality metrics. All indices are 1-based months inside the
// evaluated range 1..N; a change point q starts a new segment at q.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcpd/model.hpp"

namespace qcpd {

/// |a ∩ b| / |a ∪ b| over index sets (duplicates ignored); 1 when both are empty.
double jaccard(std::span<const int> a, std::span<const int> b);

struct Segment {
  int first = 1;  // inclusive
  int last = 0;   // inclusive
  int size() const { return last - first + 1; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Segments of 1..n induced by the points. Throws if the set is invalid for n.
std::vector<Segment> partition(const ChangePointSet& points, int n);

/// Max is the standard definition; Min reproduces a literal alternative reading.
enum class CoveringOp { Max, Min };

std::string_view to_string(CoveringOp op);
CoveringOp parse_covering_op(std::string_view text);

/// (1/n) * sum over ground-truth segments s of |s| * op_{s' in pred} J(s, s').
double covering(const ChangePointSet& gt, const ChangePointSet& pred, int n, CoveringOp op = CoveringOp::Max);

struct Match {
  int gt = 0;
  int pred = 0;
  friend bool operator==(const Match&, const Match&) = default;
};

/// One-to-one pairs within `margin`: as many as possible, then the least total
/// distance; remaining ties favour the smaller prediction.
std::vector<Match> match_true_positives(const ChangePointSet& gt, const ChangePointSet& pred, int margin);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

/// Conventions: both sets empty -> P = R = 1; empty prediction with nonempty
/// truth -> P = R = 0; empty truth -> R = 1.
PrecisionRecall precision_recall(const ChangePointSet& gt, const ChangePointSet& pred, int margin);

/// Months whose class differs from the previous month's.
ChangePointSet labels_to_changepoints(std::span<const QualityClass> classes);

struct ArticleEval {
  std::string article_id;
  int n = 0;
  double covering = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

ArticleEval evaluate_article(std::string article_id, const ChangePointSet& gt, const ChangePointSet& pred, int n,
                             int margin, CoveringOp op = CoveringOp::Max);

struct EvalReport {
  std::string label;
  int margin = 5;
  std::vector<ArticleEval> articles;  // sorted by article id
  double covering = 0.0;              // unweighted means over articles
  double precision = 0.0;
  double recall = 0.0;
  int tp = 0;  // totals
  int fp = 0;
  int fn = 0;
};

/// Means over per-article rows. Rows are sorted by id first so the result
/// does not depend on input order. Throws on an empty input.
EvalReport aggregate_report(std::vector<ArticleEval> articles, int margin, std::string label = {});

}  // namespace qcpd

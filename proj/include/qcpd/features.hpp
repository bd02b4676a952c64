#pragma once

// The 34 monthly quality indicators and the per-article series built from
// them.
//
//   F1..F6   contribution  (distinct / new registered and unregistered editors
//                           on talk and main pages)
//   F7..F14  activity      (gap mean/variance and revision counts)
//   F15..F25 content       (markers of the month's latest main revision)
//   F26..F34 readability   (see readability.hpp for the order)
//
// Contribution and activity features are computed from the revisions of one
// month. Content and readability features are snapshots of the latest main
// revision and are carried forward through months without revisions.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcpd/matrix.hpp"
#include "qcpd/model.hpp"
#include "qcpd/wikitext.hpp"

namespace qcpd {

inline constexpr int kFeatureCount = 34;
using FeatureVector = std::array<double, kFeatureCount>;

/// "F1".."F34".
std::string feature_name(int column);
/// Human-readable description of a feature column (0-based).
std::string_view feature_description(int column);

std::array<double, 6> contribution_features(const PageHistory& history, const MonthCalendar& cal, int month);
std::array<double, 8> activity_features(const PageHistory& history, const MonthCalendar& cal, int month);
std::array<double, 11> content_features(const MarkerCounts& markers, std::string_view plain_text);

/// Content and readability features (F15..F34) of one revision's wikitext.
std::array<double, 20> snapshot_features(std::string_view wikitext);

struct ArticleSeries {
  std::string article_id;
  MonthCalendar calendar = MonthCalendar::default_calendar();
  Matrix matrix;               // n_months rows
  std::vector<bool> valid;     // per month; invalid rows are ignored by detection
  ChangePointSet ground_truth; // calendar month indices
  std::optional<QualityClass> latest_class;

  /// First valid month (1-based); n_months + 1 when nothing is valid.
  int first_valid() const;
  int valid_length() const;
  /// Throws unless the matrix shape matches the calendar, valid months form
  /// one contiguous block and ground truth lies strictly inside that block.
  void validate() const;

  /// Valid rows restricted to `columns` (all columns when empty).
  Matrix detection_input(std::span<const int> columns = {}) const;
  /// Calendar month indices -> 1-based positions within the valid block.
  /// Points at or before the first valid month are dropped.
  ChangePointSet to_local(const ChangePointSet& calendar_points) const;
  ChangePointSet to_calendar(const ChangePointSet& local_points) const;
  ChangePointSet local_ground_truth() const { return to_local(ground_truth); }
};

/// Series for one article. Rejects histories without main revisions.
ArticleSeries build_series(const PageHistory& history, std::span<const QualityLabelEvent> labels,
                           const MonthCalendar& cal);

struct FeatureGroup {
  std::string name;
  std::vector<int> columns;  // 0-based, ascending
};

/// "Gc", "Ga", "Gp", "G1".."G8", "all", or unions written "Gc+Ga".
/// Throws std::invalid_argument for unknown names.
FeatureGroup feature_group(std::string_view name);

struct CorrelationResult {
  Matrix r;                       // 34 x 34 Pearson coefficients
  std::vector<int> zero_variance; // columns whose averaged series is constant
  int timestamps = 0;             // months contributing to the averages
};

/// Averages every feature across articles per month (valid rows only), then
/// correlates the averaged series pairwise. Constant series correlate 0 with
/// everything but themselves.
CorrelationResult correlation_matrix(std::span<const ArticleSeries> corpus);

struct WindowMeans {
  int window = 24;
  int change_index = 12;  // position of the change point inside the window
  Matrix means;           // window rows x feature columns
  std::vector<std::string> used;
  std::vector<std::string> skipped;
};

/// Aligns articles on a change point (the first ground-truth point unless
/// `anchors` gives one per article) and averages each feature position-wise
/// over `window` months, window / 2 of them before the point. Articles
/// without a point or a full valid window are skipped.
WindowMeans change_window_means(std::span<const ArticleSeries> corpus, int window = 24,
                                std::span<const std::optional<int>> anchors = {});

}  // namespace qcpd

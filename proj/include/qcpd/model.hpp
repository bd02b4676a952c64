#pragma once

// Canonical data model: revisions, page histories, quality classes, the
// monthly calendar and ground-truth change-point sets.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qcpd/time.hpp"

namespace qcpd {

enum class PageKind { Main, Talk };

std::string_view to_string(PageKind kind);
PageKind parse_page_kind(std::string_view text);

struct Revision {
  Instant timestamp;
  std::string editor_id;
  bool registered = true;
  PageKind page_kind = PageKind::Main;
  std::string wikitext;

  friend bool operator==(const Revision&, const Revision&) = default;
};

struct PageHistory {
  std::string article_id;
  std::vector<Revision> main_revisions;
  std::vector<Revision> talk_revisions;
  Instant creation_time;

  /// Throws std::invalid_argument when the ordering or creation-time
  /// invariants do not hold, or an editor id is empty.
  void validate() const;

  friend bool operator==(const PageHistory&, const PageHistory&) = default;
};

/// Merged quality scale, ordered FA > AGA > BC > SS. The underlying value is
/// the rank, so comparisons follow quality.
enum class QualityClass : std::uint8_t { SS = 0, BC = 1, AGA = 2, FA = 3 };

/// The seven assessment grades as they appear on talk pages.
enum class RawClass : std::uint8_t { FA, A, GA, B, C, Start, Stub };

inline int rank(QualityClass c) { return static_cast<int>(c); }

std::string_view to_string(QualityClass c);
std::string_view to_string(RawClass c);

/// Accepts the canonical spelling of a raw grade, case-insensitively and
/// ignoring surrounding whitespace. Throws UnknownClassError otherwise.
RawClass parse_raw_class(std::string_view token);
std::optional<RawClass> try_parse_raw_class(std::string_view token);

/// Accepts "FA", "AGA", "BC" or "SS".
QualityClass parse_quality_class(std::string_view token);

class UnknownClassError : public std::invalid_argument {
 public:
  explicit UnknownClassError(std::string token)
      : std::invalid_argument("unrecognized quality class: '" + token + "'"), token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

QualityClass merge_quality_class(RawClass raw);
/// String form; rejects with the offending token.
QualityClass merge_quality_class(std::string_view raw);

/// Raw grade that maps onto a merged class (FA, GA, B, Start).
RawClass canonical_raw(QualityClass c);

struct QualityLabelEvent {
  Instant timestamp;
  RawClass raw_class = RawClass::Stub;
  QualityClass merged_class = QualityClass::SS;

  static QualityLabelEvent make(Instant t, RawClass raw) { return {t, raw, merge_quality_class(raw)}; }

  friend bool operator==(const QualityLabelEvent&, const QualityLabelEvent&) = default;
};

/// A run of consecutive calendar months; month indices are 1-based.
class MonthCalendar {
 public:
  static constexpr int kDefaultMonths = 156;

  MonthCalendar(YearMonth start, int n_months);

  /// 156 months ending 2019-06.
  static MonthCalendar default_calendar();

  YearMonth start() const { return start_; }
  int n_months() const { return n_months_; }
  YearMonth month(int index) const { return start_.plus_months(index - 1); }
  int days_in_month(int index) const { return month(index).days(); }
  Instant month_begin(int index) const { return month(index).first_instant(); }

  /// Index in 1..n_months, or nullopt outside the window.
  std::optional<int> index_of(Instant t) const;
  /// Unclamped month offset: may be < 1 or > n_months.
  int raw_index_of(Instant t) const { return YearMonth::of(t).serial() - start_.serial() + 1; }

  friend bool operator==(const MonthCalendar&, const MonthCalendar&) = default;

 private:
  YearMonth start_;
  int n_months_;
};

/// Strictly increasing month indices q with 1 < q <= n. Each q is the first
/// index of the new segment.
struct ChangePointSet {
  std::vector<int> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool is_valid(int n) const;
  /// Builds a set, rejecting anything that violates the invariants.
  static ChangePointSet checked(std::vector<int> points, int n);

  friend bool operator==(const ChangePointSet&, const ChangePointSet&) = default;
};

/// For each calendar month, the revision with the greatest timestamp in that
/// month. Equal timestamps keep the later element in input order.
std::vector<std::optional<Revision>> bin_monthly(std::span<const Revision> revisions, const MonthCalendar& cal,
                                                 std::optional<Instant> creation_time = std::nullopt);
std::vector<std::optional<Revision>> bin_monthly(const PageHistory& history, const MonthCalendar& cal);

/// Month of every label event whose merged class differs from the previous
/// event's. The first assessment is never a change; several changes within one
/// month collapse to one point; points outside the calendar or in month 1 are
/// dropped.
ChangePointSet ground_truth_changepoints(std::span<const QualityLabelEvent> events, const MonthCalendar& cal);

/// Merged class in force at the end of every calendar month, or nullopt
/// before the first assessment.
std::vector<std::optional<QualityClass>> monthly_classes(std::span<const QualityLabelEvent> events,
                                                         const MonthCalendar& cal);

}  // namespace qcpd

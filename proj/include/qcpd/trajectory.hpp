#pragma once

// Temporal patterns of merged quality labels: promotion/demotion
// classification, transition statistics and cyclic switches.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcpd/model.hpp"

namespace qcpd {

struct QualityTrajectory {
  struct Label {
    Instant timestamp;
    QualityClass quality;
    friend bool operator==(const Label&, const Label&) = default;
  };

  std::string article_id;
  std::vector<Label> labeled;
  Instant creation_time;

  /// Builds from label events, rejecting non-increasing timestamps.
  static QualityTrajectory from_events(std::string article_id, std::span<const QualityLabelEvent> events,
                                       Instant creation_time);
};

enum class TrajectoryKind { OnlyPromotion, OnlyDemotion, Both, NoChange };

std::string_view to_string(TrajectoryKind kind);

/// Consecutive equal classes collapsed; the first timestamp of a run is kept.
std::vector<QualityTrajectory::Label> dedupe_labels(std::span<const QualityTrajectory::Label> labels);

TrajectoryKind classify_trajectory(const QualityTrajectory& t);

struct TransitionStat {
  QualityClass from = QualityClass::SS;
  QualityClass to = QualityClass::SS;
  int hops = 0;
  long count = 0;
  double avg_days = 0.0;
  double sd_days = 0.0;  // population standard deviation
};

/// Running sums for one (from, to) pair. Merging is associative, so corpus
/// statistics can be folded from per-article partial results.
struct TransitionAccumulator {
  long count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double days) {
    ++count;
    sum += days;
    sum_sq += days * days;
  }
  void merge(const TransitionAccumulator& other) {
    count += other.count;
    sum += other.sum;
    sum_sq += other.sum_sq;
  }
};

using TransitionTable = std::map<std::pair<QualityClass, QualityClass>, TransitionAccumulator>;

/// Adjacent pairs of the deduplicated sequence with elapsed days between
/// their label timestamps.
TransitionTable transition_table(const QualityTrajectory& t);

/// Per (from, to): count, mean and population SD of elapsed days. A path
/// SS -> BC -> FA contributes once to SS -> BC and once to BC -> FA; a
/// directly observed SS -> FA contributes to SS -> FA with hops = 3.
/// `only_kind` restricts the corpus to trajectories of that kind.
std::vector<TransitionStat> transition_stats(std::span<const QualityTrajectory> corpus,
                                             std::optional<TrajectoryKind> only_kind = std::nullopt);

struct CyclicSwitch {
  std::vector<QualityClass> class_sequence;
  int length = 0;
  Instant start;
  Instant end;
  double turnaround_days = 0.0;
};

/// For every start index i of the deduplicated sequence, the first j > i + 1
/// with class_j == class_i yields one switch of length j - i + 1. Overlapping
/// switches from different start indices are all reported.
std::vector<CyclicSwitch> find_cyclic_switches(const QualityTrajectory& t);

struct SwitchHistograms {
  static constexpr double kRapidDays = 15.0;

  std::map<int, long> by_length;            // switch length -> switch count
  std::map<int, long> articles_by_count;    // switches per article -> articles
  std::map<int, long> articles_with_length; // length -> articles having >= 1 such switch
  long articles_with_switches = 0;
  long rapid_switches = 0;                  // switches with turnaround < 15 days
  long articles_with_rapid = 0;             // articles whose fastest switch is < 15 days
  std::map<int, long> rapid_by_length;
  double mean_turnaround_days = 0.0;
  double mean_turnaround_length3_days = 0.0;
  std::map<std::string, long> length3_patterns;  // "BC>SS>BC" -> count
};

SwitchHistograms switch_histograms(std::span<const QualityTrajectory> corpus);

/// Class of every trajectory never changes: days from creation to the first
/// assessment, per class.
struct NoChangeStat {
  QualityClass quality = QualityClass::SS;
  long count = 0;
  double mean_days = 0.0;
  double sd_days = 0.0;
};

std::vector<NoChangeStat> no_change_stats(std::span<const QualityTrajectory> corpus);

}  // namespace qcpd

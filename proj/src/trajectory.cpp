#include "qcpd/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcpd {

namespace {

double population_sd(const TransitionAccumulator& acc) {
  if (acc.count == 0) return 0.0;
  double mean = acc.sum / static_cast<double>(acc.count);
  double var = acc.sum_sq / static_cast<double>(acc.count) - mean * mean;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

}  // namespace

QualityTrajectory QualityTrajectory::from_events(std::string article_id, std::span<const QualityLabelEvent> events,
                                                 Instant creation_time) {
  QualityTrajectory t{std::move(article_id), {}, creation_time};
  t.labeled.reserve(events.size());
  for (const auto& e : events) {
    if (!t.labeled.empty() && e.timestamp <= t.labeled.back().timestamp)
      throw std::invalid_argument(t.article_id + ": label timestamps must be strictly increasing");
    t.labeled.push_back({e.timestamp, e.merged_class});
  }
  return t;
}

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::OnlyPromotion: return "only_promotion";
    case TrajectoryKind::OnlyDemotion: return "only_demotion";
    case TrajectoryKind::Both: return "both";
    case TrajectoryKind::NoChange: return "no_change";
  }
  return "?";
}

std::vector<QualityTrajectory::Label> dedupe_labels(std::span<const QualityTrajectory::Label> labels) {
  std::vector<QualityTrajectory::Label> out;
  for (const auto& l : labels)
    if (out.empty() || out.back().quality != l.quality) out.push_back(l);
  return out;
}

TrajectoryKind classify_trajectory(const QualityTrajectory& t) {
  if (t.labeled.empty()) throw std::invalid_argument(t.article_id + ": empty trajectory");
  auto seq = dedupe_labels(t.labeled);
  if (seq.size() <= 1) return TrajectoryKind::NoChange;
  bool up = false, down = false;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (rank(seq[i].quality) > rank(seq[i - 1].quality))
      up = true;
    else
      down = true;
  }
  if (up && down) return TrajectoryKind::Both;
  return up ? TrajectoryKind::OnlyPromotion : TrajectoryKind::OnlyDemotion;
}

TransitionTable transition_table(const QualityTrajectory& t) {
  TransitionTable table;
  auto seq = dedupe_labels(t.labeled);
  for (std::size_t i = 1; i < seq.size(); ++i)
    table[{seq[i - 1].quality, seq[i].quality}].add(days_between(seq[i - 1].timestamp, seq[i].timestamp));
  return table;
}

std::vector<TransitionStat> transition_stats(std::span<const QualityTrajectory> corpus,
                                             std::optional<TrajectoryKind> only_kind) {
  TransitionTable total;
  for (const auto& t : corpus) {
    if (t.labeled.empty()) continue;
    if (only_kind && classify_trajectory(t) != *only_kind) continue;
    for (const auto& [key, acc] : transition_table(t)) total[key].merge(acc);
  }
  std::vector<TransitionStat> out;
  out.reserve(total.size());
  for (const auto& [key, acc] : total) {
    TransitionStat s;
    s.from = key.first;
    s.to = key.second;
    s.hops = std::abs(rank(key.first) - rank(key.second));
    s.count = acc.count;
    s.avg_days = acc.count ? acc.sum / static_cast<double>(acc.count) : 0.0;
    s.sd_days = population_sd(acc);
    out.push_back(s);
  }
  return out;
}

std::vector<CyclicSwitch> find_cyclic_switches(const QualityTrajectory& t) {
  auto seq = dedupe_labels(t.labeled);
  std::vector<CyclicSwitch> out;
  for (std::size_t i = 0; i + 2 < seq.size(); ++i) {
    for (std::size_t j = i + 2; j < seq.size(); ++j) {
      if (seq[j].quality != seq[i].quality) continue;
      CyclicSwitch sw;
      for (std::size_t k = i; k <= j; ++k) sw.class_sequence.push_back(seq[k].quality);
      sw.length = static_cast<int>(j - i + 1);
      sw.start = seq[i].timestamp;
      sw.end = seq[j].timestamp;
      sw.turnaround_days = days_between(sw.start, sw.end);
      out.push_back(std::move(sw));
      break;
    }
  }
  return out;
}

SwitchHistograms switch_histograms(std::span<const QualityTrajectory> corpus) {
  SwitchHistograms h;
  double sum_all = 0.0, sum_len3 = 0.0;
  long n_all = 0, n_len3 = 0;
  for (const auto& t : corpus) {
    auto switches = find_cyclic_switches(t);
    ++h.articles_by_count[static_cast<int>(switches.size())];
    if (switches.empty()) continue;
    ++h.articles_with_switches;
    std::map<int, bool> lengths_seen;
    double fastest = switches.front().turnaround_days;
    for (const auto& sw : switches) {
      ++h.by_length[sw.length];
      lengths_seen[sw.length] = true;
      fastest = std::min(fastest, sw.turnaround_days);
      sum_all += sw.turnaround_days;
      ++n_all;
      if (sw.turnaround_days < SwitchHistograms::kRapidDays) {
        ++h.rapid_switches;
        ++h.rapid_by_length[sw.length];
      }
      if (sw.length == 3) {
        sum_len3 += sw.turnaround_days;
        ++n_len3;
        std::string key;
        for (QualityClass c : sw.class_sequence) {
          if (!key.empty()) key += '>';
          key += to_string(c);
        }
        ++h.length3_patterns[key];
      }
    }
    for (const auto& [len, _] : lengths_seen) ++h.articles_with_length[len];
    if (fastest < SwitchHistograms::kRapidDays) ++h.articles_with_rapid;
  }
  h.mean_turnaround_days = n_all ? sum_all / static_cast<double>(n_all) : 0.0;
  h.mean_turnaround_length3_days = n_len3 ? sum_len3 / static_cast<double>(n_len3) : 0.0;
  return h;
}

std::vector<NoChangeStat> no_change_stats(std::span<const QualityTrajectory> corpus) {
  std::map<QualityClass, TransitionAccumulator> acc;
  for (const auto& t : corpus) {
    if (t.labeled.empty() || classify_trajectory(t) != TrajectoryKind::NoChange) continue;
    acc[t.labeled.front().quality].add(days_between(t.creation_time, t.labeled.front().timestamp));
  }
  std::vector<NoChangeStat> out;
  for (auto it = acc.rbegin(); it != acc.rend(); ++it) {
    const auto& a = it->second;
    out.push_back({it->first, a.count, a.count ? a.sum / static_cast<double>(a.count) : 0.0, population_sd(a)});
  }
  return out;
}

}  // namespace qcpd

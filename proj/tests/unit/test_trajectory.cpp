#include <doctest.h>

#include <chrono>

#include "oracles.hpp"
#include "qcpd/trajectory.hpp"

using namespace qcpd;
using QC = QualityClass;

namespace {

// Labels at the given day offsets from 2010-01-01.
QualityTrajectory traj(std::vector<std::pair<QC, int>> labels, std::string id = "a") {
  QualityTrajectory t;
  t.article_id = std::move(id);
  Instant base = oracle::instant(2010, 1, 1);
  t.creation_time = base;
  for (auto [c, day] : labels) t.labeled.push_back({base + std::chrono::days(day), c});
  return t;
}

QualityTrajectory seq(std::vector<QC> classes) {
  std::vector<std::pair<QC, int>> labels;
  for (std::size_t i = 0; i < classes.size(); ++i) labels.emplace_back(classes[i], static_cast<int>(10 * i));
  return traj(labels);
}

const TransitionStat* find_stat(const std::vector<TransitionStat>& stats, QC from, QC to) {
  for (const auto& s : stats)
    if (s.from == from && s.to == to) return &s;
  return nullptr;
}

}  // namespace

TEST_CASE("classify_trajectory") {
  CHECK(classify_trajectory(seq({QC::SS, QC::BC, QC::FA})) == TrajectoryKind::OnlyPromotion);
  CHECK(classify_trajectory(seq({QC::FA, QC::BC})) == TrajectoryKind::OnlyDemotion);
  CHECK(classify_trajectory(seq({QC::BC, QC::AGA, QC::BC})) == TrajectoryKind::Both);
  CHECK(classify_trajectory(seq({QC::SS})) == TrajectoryKind::NoChange);
  CHECK(classify_trajectory(seq({QC::SS, QC::SS, QC::SS})) == TrajectoryKind::NoChange);
  CHECK(classify_trajectory(seq({QC::SS, QC::SS, QC::FA})) == TrajectoryKind::OnlyPromotion);
  CHECK_THROWS(classify_trajectory(seq({})));
}

TEST_CASE("from_events rejects non-increasing timestamps") {
  Instant t = oracle::instant(2011, 1, 1);
  std::vector<QualityLabelEvent> ev{QualityLabelEvent::make(t, RawClass::B), QualityLabelEvent::make(t, RawClass::FA)};
  CHECK_THROWS(QualityTrajectory::from_events("x", ev, t));
}

TEST_CASE("transition_stats single pair") {
  std::vector<QualityTrajectory> corpus{traj({{QC::SS, 0}, {QC::BC, 100}})};
  auto stats = transition_stats(corpus);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].from == QC::SS);
  CHECK(stats[0].to == QC::BC);
  CHECK(stats[0].count == 1);
  CHECK(stats[0].avg_days == doctest::Approx(100.0));
  CHECK(stats[0].sd_days == doctest::Approx(0.0));
  CHECK(stats[0].hops == 1);
}

TEST_CASE("transition_stats counts each observed sub-transition") {
  std::vector<QualityTrajectory> corpus{traj({{QC::SS, 0}, {QC::BC, 100}, {QC::FA, 160}})};
  auto stats = transition_stats(corpus);
  REQUIRE(stats.size() == 2);
  CHECK(find_stat(stats, QC::SS, QC::BC)->count == 1);
  CHECK(find_stat(stats, QC::BC, QC::FA)->count == 1);
  CHECK(find_stat(stats, QC::BC, QC::FA)->avg_days == doctest::Approx(60.0));
  CHECK(find_stat(stats, QC::SS, QC::FA) == nullptr);

  std::vector<QualityTrajectory> direct{traj({{QC::SS, 0}, {QC::FA, 50}})};
  auto d = transition_stats(direct);
  REQUIRE(d.size() == 1);
  CHECK(d[0].hops == 3);
}

TEST_CASE("transition_stats pools articles with population SD") {
  std::vector<QualityTrajectory> corpus{traj({{QC::SS, 0}, {QC::BC, 100}}, "a"), traj({{QC::SS, 0}, {QC::BC, 300}}, "b")};
  auto stats = transition_stats(corpus);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].count == 2);
  CHECK(stats[0].avg_days == doctest::Approx(200.0));
  CHECK(stats[0].sd_days == doctest::Approx(100.0));
}

TEST_CASE("transition_stats can be restricted to one kind") {
  std::vector<QualityTrajectory> corpus{seq({QC::SS, QC::BC}), seq({QC::FA, QC::BC})};
  auto promo = transition_stats(corpus, TrajectoryKind::OnlyPromotion);
  REQUIRE(promo.size() == 1);
  CHECK(promo[0].from == QC::SS);
}

TEST_CASE("accumulator merge is associative") {
  TransitionAccumulator a, b, c;
  a.add(1);
  b.add(5);
  b.add(7);
  c.add(11);
  TransitionAccumulator left = a, right = b;
  left.merge(b);
  left.merge(c);
  right.merge(c);
  TransitionAccumulator right_total = a;
  right_total.merge(right);
  CHECK(left.count == right_total.count);
  CHECK(left.sum == right_total.sum);
  CHECK(left.sum_sq == right_total.sum_sq);
}

TEST_CASE("find_cyclic_switches examples") {
  auto s = find_cyclic_switches(seq({QC::BC, QC::SS, QC::BC}));
  REQUIRE(s.size() == 1);
  CHECK(s[0].length == 3);
  CHECK(s[0].class_sequence == std::vector<QC>{QC::BC, QC::SS, QC::BC});

  auto eq2 = find_cyclic_switches(seq({QC::FA, QC::AGA, QC::BC, QC::FA}));
  REQUIRE(eq2.size() == 1);
  CHECK(eq2[0].length == 4);

  CHECK(find_cyclic_switches(seq({QC::SS, QC::BC, QC::AGA})).empty());
}

TEST_CASE("overlapping switches from different starts are all reported") {
  auto s = find_cyclic_switches(seq({QC::BC, QC::SS, QC::BC, QC::SS}));
  REQUIRE(s.size() == 2);
  CHECK(s[0].class_sequence == std::vector<QC>{QC::BC, QC::SS, QC::BC});
  CHECK(s[1].class_sequence == std::vector<QC>{QC::SS, QC::BC, QC::SS});
}

TEST_CASE("switch turnaround uses label timestamps") {
  auto s = find_cyclic_switches(traj({{QC::BC, 0}, {QC::SS, 4}, {QC::BC, 10}}));
  REQUIRE(s.size() == 1);
  CHECK(s[0].turnaround_days == doctest::Approx(10.0));
}

TEST_CASE("switch histograms") {
  std::vector<QualityTrajectory> corpus{traj({{QC::BC, 0}, {QC::SS, 4}, {QC::BC, 10}}, "a"),
                                        traj({{QC::FA, 0}, {QC::AGA, 5}, {QC::BC, 12}, {QC::FA, 20}}, "b"),
                                        traj({{QC::SS, 0}}, "c")};
  auto h = switch_histograms(corpus);
  CHECK(h.by_length == std::map<int, long>{{3, 1}, {4, 1}});
  CHECK(h.rapid_switches == 1);  // 10 days in, 20 days out
  CHECK(h.articles_with_switches == 2);
  CHECK(h.articles_by_count == std::map<int, long>{{0, 1}, {1, 2}});
  CHECK(h.length3_patterns["BC>SS>BC"] == 1);
}

TEST_CASE("no-change statistics measure time to first assessment") {
  std::vector<QualityTrajectory> corpus{traj({{QC::SS, 30}}, "a"), traj({{QC::SS, 50}, {QC::SS, 90}}, "b"),
                                        traj({{QC::FA, 10}, {QC::SS, 20}}, "c")};
  auto stats = no_change_stats(corpus);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].quality == QC::SS);
  CHECK(stats[0].count == 2);
  CHECK(stats[0].mean_days == doctest::Approx(40.0));
}

TEST_CASE("random trajectories: switch invariants and kind consistency") {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    auto classes = oracle::random_classes(rng, 20);
    QualityTrajectory t = oracle::trajectory_of(classes, rng);
    TrajectoryKind kind = classify_trajectory(t);
    auto switches = find_cyclic_switches(t);
    auto table = transition_table(t);
    CHECK((kind == TrajectoryKind::NoChange) == (switches.empty() && table.empty()));
    for (const auto& sw : switches) {
      CHECK(sw.class_sequence.front() == sw.class_sequence.back());
      CHECK(sw.length >= 3);
      CHECK(sw.length == static_cast<int>(sw.class_sequence.size()));
      for (std::size_t k = 1; k < sw.class_sequence.size(); ++k) CHECK(sw.class_sequence[k] != sw.class_sequence[k - 1]);
    }
    if (kind == TrajectoryKind::OnlyPromotion)
      for (const auto& [key, acc] : table) CHECK(rank(key.second) > rank(key.first));
  }
}

// Exit-gate checks. Prints one PASS/FAIL line per criterion and exits nonzero
// when any criterion fails. All randomness derives from kSeed, fixed before
// the first run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qcpd/cost.hpp"
#include "qcpd/detect.hpp"
#include "qcpd/dump_xml.hpp"
#include "qcpd/evaluation.hpp"
#include "qcpd/features.hpp"
#include "qcpd/harness.hpp"
#include "qcpd/io.hpp"
#include "qcpd/labels.hpp"
#include "qcpd/readability.hpp"
#include "qcpd/synth.hpp"
#include "qcpd/trajectory.hpp"

using namespace qcpd;

namespace {

constexpr std::uint64_t kSeed = 20190630;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ------------------------------------------------------------------ 1

Outcome pelt_oracle_equivalence() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(derive_seed(kSeed, "pelt-oracle"));
  const double pens[] = {0.5, 1.0, 2.0};
  int mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 2 + rng.below(29);
    std::size_t d = 1 + rng.below(3);
    Matrix m = (i % 2 == 0) ? oracle::random_piecewise(rng, n, d) : oracle::random_matrix(rng, n, d);
    RbfCost cost(m);
    double pen = pens[i % 3];
    if (!(detect_pelt(cost, pen) == oracle_optimal_segmentation(cost, pen).points)) ++mismatches;
  }
  double secs = seconds_since(t0);
  o.require(mismatches == 0, std::to_string(mismatches) + " of 200 series differ");
  o.require(secs < 60.0, "runtime " + fmt("%.2f s", secs));
  o.note("200 series, " + fmt("%.2f s", secs));
  return o;
}

// ------------------------------------------------------------------ 2

Outcome metric_fixtures() {
  Outcome o;
  double c = covering(ChangePointSet{{6}}, ChangePointSet{{4}}, 10);
  o.require(std::abs(c - 0.657143) <= 1e-6, "covering " + fmt("%.8f", c));
  auto pr = precision_recall(ChangePointSet{{10, 50}}, ChangePointSet{{12, 30, 53}}, 5);
  o.require(pr.precision == 2.0 / 3.0 && pr.recall == 1.0,
            "P/R " + fmt("%.17g", pr.precision) + "/" + fmt("%.17g", pr.recall));
  auto dup = precision_recall(ChangePointSet{{10}}, ChangePointSet{{10, 11}}, 5);
  o.require(dup.tp == 1, "double-count TP " + std::to_string(dup.tp));
  o.note("covering " + fmt("%.6f", c));
  return o;
}

// ------------------------------------------------------------------ 3

Outcome synthetic_recovery() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  SynthCorpusSpec spec;
  spec.articles = 100;
  spec.n_months = 156;
  spec.dims = 34;
  spec.n_breaks = 3;
  spec.min_gap = 20;
  spec.shift = 5.0;
  spec.noise = 1.0;
  spec.seed = derive_seed(kSeed, "recovery");
  auto corpus = synth_corpus(spec);

  auto points_of = [](const std::vector<DetectionResult>& r) {
    std::vector<ChangePointSet> out;
    for (const auto& x : r) out.push_back(x.points);
    return out;
  };

  DetectorConfig pelt;
  pelt.algorithm = Algorithm::Pelt;
  pelt.pen = 1.0;
  EvalReport rp = evaluate_corpus(corpus, points_of(detect_corpus(corpus, pelt)), 5);

  DetectorConfig ecp;
  ecp.algorithm = Algorithm::Ecp;
  ecp.ecp.min_size = 5;
  ecp.ecp.alpha = 0.05;
  ecp.ecp.seed = derive_seed(kSeed, "recovery-ecp");
  EvalReport re = evaluate_corpus(corpus, points_of(detect_corpus(corpus, ecp)), 5);

  double secs = seconds_since(t0);
  o.require(rp.recall >= 0.95, "PELT recall " + fmt("%.4f", rp.recall));
  o.require(rp.covering >= 0.90, "PELT covering " + fmt("%.4f", rp.covering));
  o.require(re.recall >= 0.90, "ECP recall " + fmt("%.4f", re.recall));
  o.require(secs < 300.0, "runtime " + fmt("%.1f s", secs));
  o.note("PELT recall " + fmt("%.4f", rp.recall) + " covering " + fmt("%.4f", rp.covering) + ", ECP recall " +
         fmt("%.4f", re.recall) + ", " + fmt("%.1f s", secs));
  return o;
}

// ------------------------------------------------------------------ 4

std::vector<ArticleSeries> noise_corpus() {
  std::vector<ArticleSeries> out;
  for (int i = 0; i < 100; ++i) {
    SynthSpec s;
    s.article_id = "noise-" + std::to_string(i);
    s.n_months = 156;
    s.dims = 34;
    s.seed = derive_seed(kSeed, s.article_id);
    out.push_back(synth_generate(s));
  }
  return out;
}

Outcome false_alarm_control() {
  Outcome o;
  auto corpus = noise_corpus();
  DetectorConfig ecp;
  ecp.algorithm = Algorithm::Ecp;
  ecp.ecp.alpha = 0.05;
  ecp.ecp.seed = derive_seed(kSeed, "noise-ecp");
  int empty = 0;
  for (const auto& r : detect_corpus(corpus, ecp)) empty += r.points.empty();

  DetectorConfig pelt;
  pelt.algorithm = Algorithm::Pelt;
  pelt.pen = 1.0;
  double total = 0.0;
  for (const auto& r : detect_corpus(corpus, pelt)) total += static_cast<double>(r.points.size());
  double mean_q = total / 100.0;

  o.require(empty >= 95, "ECP empty on " + std::to_string(empty) + "/100");
  o.require(mean_q <= 1.0, "PELT mean |Q| " + fmt("%.2f", mean_q));
  o.note("ECP empty " + std::to_string(empty) + "/100, PELT mean |Q| " + fmt("%.2f", mean_q));
  return o;
}

// ------------------------------------------------------------------ 5

Outcome pelt_monotonicity() {
  Outcome o;
  std::vector<Matrix> fixtures;
  SynthCorpusSpec spec;
  spec.articles = 100;
  spec.seed = derive_seed(kSeed, "recovery");
  for (const auto& s : synth_corpus(spec)) fixtures.push_back(s.detection_input());
  for (const auto& s : noise_corpus()) fixtures.push_back(s.detection_input());
  Rng rng(derive_seed(kSeed, "monotone"));
  for (int i = 0; i < 100; ++i) fixtures.push_back(oracle::random_piecewise(rng, 10 + rng.below(60), 1 + rng.below(4)));

  int violations = 0;
  for (const Matrix& m : fixtures) {
    RbfCost cost(m);
    std::size_t last = SIZE_MAX;
    for (double pen : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      std::size_t k = detect_pelt(cost, pen).size();
      if (k > last) ++violations;
      last = k;
    }
  }
  o.require(violations == 0, std::to_string(violations) + " increases");
  o.note(std::to_string(fixtures.size()) + " series");
  return o;
}

// ------------------------------------------------------------------ 6

Outcome feature_invariants() {
  Outcome o;
  Rng rng(derive_seed(kSeed, "histories"));
  MonthCalendar cal = MonthCalendar::default_calendar();
  int violations = 0, nondeterministic = 0;
  for (int i = 0; i < 1000; ++i) {
    PageHistory h = oracle::random_history(rng, "h" + std::to_string(i));
    ArticleSeries a = build_series(h, {}, cal);
    for (std::size_t m = 0; m < a.matrix.rows(); ++m)
      if (a.matrix(m, 1) > a.matrix(m, 0) || a.matrix(m, 4) > a.matrix(m, 3)) ++violations;
    std::ostringstream x, y;
    write_series_csv(x, a);
    write_series_csv(y, build_series(h, {}, cal));
    if (x.str() != y.str()) ++nondeterministic;
  }
  double fre = readability_features("The cat sat.")[0];
  o.require(violations == 0, std::to_string(violations) + " month rows violate F2<=F1 or F5<=F4");
  o.require(nondeterministic == 0, std::to_string(nondeterministic) + " recomputations differ");
  o.require(std::abs(fre - 119.19) <= 0.01, "Flesch " + fmt("%.4f", fre));
  o.note("1000 histories, Flesch " + fmt("%.3f", fre));
  return o;
}

// ------------------------------------------------------------------ 7

Outcome trajectory_oracle() {
  Outcome o;
  Rng rng(derive_seed(kSeed, "trajectories"));
  int disagreements = 0, kind_errors = 0;
  for (int i = 0; i < 1000; ++i) {
    auto classes = oracle::random_classes(rng, 20);
    QualityTrajectory t = oracle::trajectory_of(classes, rng);
    auto got = find_cyclic_switches(t);
    auto want = oracle::cyclic_switches(classes);
    bool same = got.size() == want.size();
    for (std::size_t k = 0; same && k < got.size(); ++k)
      same = got[k].class_sequence == want[k].classes &&
             got[k].length == static_cast<int>(want[k].j - want[k].i + 1);
    if (!same) ++disagreements;

    int ups = 0, downs = 0;
    for (std::size_t k = 1; k < classes.size(); ++k) {
      if (classes[k] > classes[k - 1]) ++ups;
      if (classes[k] < classes[k - 1]) ++downs;
    }
    TrajectoryKind expected = ups == 0 && downs == 0 ? TrajectoryKind::NoChange
                              : downs == 0           ? TrajectoryKind::OnlyPromotion
                              : ups == 0             ? TrajectoryKind::OnlyDemotion
                                                     : TrajectoryKind::Both;
    int matches = 0;
    TrajectoryKind kind = classify_trajectory(t);
    for (TrajectoryKind k : {TrajectoryKind::OnlyPromotion, TrajectoryKind::OnlyDemotion, TrajectoryKind::Both,
                             TrajectoryKind::NoChange})
      matches += kind == k;
    if (matches != 1 || kind != expected) ++kind_errors;
  }
  QualityTrajectory fixture = oracle::trajectory_of(
      {QualityClass::FA, QualityClass::AGA, QualityClass::BC, QualityClass::FA}, rng);
  auto sw = find_cyclic_switches(fixture);
  o.require(disagreements == 0, std::to_string(disagreements) + " sequences disagree with brute force");
  o.require(kind_errors == 0, std::to_string(kind_errors) + " misclassified");
  o.require(sw.size() == 1 && sw[0].length == 4, "FA,AGA,BC,FA switch length not 4");
  o.note("1000 sequences");
  return o;
}

// ------------------------------------------------------------------ 8

Outcome ingestion() {
  Outcome o;
  auto dir = std::filesystem::path(QCPD_FIXTURE_DIR);
  auto ts = [](const char* s) { return parse_timestamp(s); };
  try {
    auto reg = parse_mediawiki_xml_file(dir / "registered.xml");
    PageHistory want_reg{"Alpha Centauri",
                         {{ts("2010-05-01T12:00:00Z"), "Alice", true, PageKind::Main,
                           "'''Alpha Centauri''' is a [[star system]] & a <b>test</b>."}},
                         {},
                         ts("2010-05-01T12:00:00Z")};
    o.require(reg.size() == 1 && reg[0] == want_reg, "registered fixture mismatch");

    auto ip = parse_mediawiki_xml_file(dir / "ip.xml");
    PageHistory want_ip{"Beta",
                        {{ts("2011-02-03T04:05:06Z"), "127.0.0.1", false, PageKind::Main, "Beta is a letter."}},
                        {},
                        ts("2011-02-03T04:05:06Z")};
    o.require(ip.size() == 1 && ip[0] == want_ip, "IP fixture mismatch");

    auto talk = parse_mediawiki_xml_file(dir / "talk_pairing.xml");
    PageHistory want_talk{
        "Foo",
        {{ts("2012-02-10T10:00:00Z"), "Bob", true, PageKind::Main, "Foo is a [[placeholder]]."},
         {ts("2012-04-10T10:00:00Z"), "Dave", true, PageKind::Main, "Foo is a common [[placeholder]] name."}},
        {{ts("2012-03-01T00:00:00Z"), "Carol", true, PageKind::Talk, "{{WikiProject France|class=GA|importance=high}}"},
         {ts("2012-06-15T08:30:00Z"), "2001:db8::1", false, PageKind::Talk,
          "{{WikiProject France|class = start|importance=high}}\n== Sources ==\nNeeds more."}},
        ts("2012-02-10T10:00:00Z")};
    o.require(talk.size() == 1 && talk[0] == want_talk, "talk pairing fixture mismatch");

    std::vector<PageHistory> all{reg[0], ip[0], talk[0]};
    std::stringstream buf;
    write_revisions_jsonl(buf, all);
    o.require(read_revisions_jsonl(buf) == all, "revision JSONL round-trip is lossy");

    std::vector<Revision> banner{{ts("2012-03-01T00:00:00Z"), "c", true, PageKind::Talk, "{{WikiProject X|class=GA}}"}};
    auto ev = extract_quality_labels(banner);
    o.require(ev.size() == 1 && ev[0].raw_class == RawClass::GA && ev[0].merged_class == QualityClass::AGA,
              "GA banner did not yield an AGA event");
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  return o;
}

// ------------------------------------------------------------------ 9

struct PipelineRun {
  std::string reports;  // serialized, for byte comparison
  std::map<Algorithm, EvalReport> individual;
  EvalReport aggregate_max;
  EvalReport per_article_max;
};

PipelineRun run_pipeline(const std::filesystem::path& dir) {
  SynthCorpusSpec spec;
  spec.articles = 50;
  spec.seed = derive_seed(kSeed, "pipeline");
  std::filesystem::remove_all(dir);
  write_corpus(dir, synth_corpus(spec));
  auto corpus = read_corpus(dir);
  Json truth = ground_truth_json(corpus);
  auto gt = parse_ground_truth(truth);

  PipelineRun run;
  for (Algorithm a : {Algorithm::BinSeg, Algorithm::Pelt, Algorithm::Ecp}) {
    DetectorConfig cfg;
    cfg.algorithm = a;
    cfg.n_bkps = 3;
    cfg.ecp.seed = spec.seed;
    auto results = detect_corpus(corpus, cfg);
    PredictionSet preds;
    preds.metadata["algorithm"] = std::string(to_string(a));
    for (std::size_t i = 0; i < corpus.size(); ++i) preds.points[corpus[i].article_id] = results[i].points;
    PredictionSet loaded = parse_predictions(predictions_json(preds));

    std::vector<ArticleEval> rows;
    for (const auto& [id, entry] : gt) {
      const ArticleSeries* s = nullptr;
      for (const auto& c : corpus)
        if (c.article_id == id) s = &c;
      rows.push_back(evaluate_article(id, s->local_ground_truth(), s->to_local(loaded.points.at(id)), entry.length, 5));
    }
    EvalReport r = aggregate_report(rows, 5, std::string(to_string(a)));
    run.reports += report_json(r).dump() + "\n";
    run.individual[a] = r;
  }
  run.aggregate_max = hybrid_report(run.individual, HybridMode::AggregateMax);
  run.per_article_max = hybrid_report(run.individual, HybridMode::PerArticleMax);
  run.reports += report_json(run.aggregate_max).dump() + "\n" + report_json(run.per_article_max).dump() + "\n";
  return run;
}

Outcome end_to_end() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  auto base = std::filesystem::temp_directory_path() / "qcpd_acceptance";
  PipelineRun first = run_pipeline(base / "a");
  double secs = seconds_since(t0);
  PipelineRun second = run_pipeline(base / "b");
  std::filesystem::remove_all(base);

  double best = 0.0;
  for (const auto& [a, r] : first.individual) best = std::max(best, r.covering);
  o.require(secs < 120.0, "runtime " + fmt("%.1f s", secs));
  o.require(first.reports == second.reports, "reports differ between identical runs");
  o.require(first.aggregate_max.covering == best, "aggregate-max covering " + fmt("%.6f", first.aggregate_max.covering) +
                                                      " != " + fmt("%.6f", best));
  o.require(first.per_article_max.covering >= best, "per-article-max covering below the best detector");
  o.note("HYBRID covering " + fmt("%.4f", first.aggregate_max.covering) + " / " +
         fmt("%.4f", first.per_article_max.covering) + ", " + fmt("%.1f s", secs));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"AC1 pelt_equals_unpruned_oracle", pelt_oracle_equivalence},
      {"AC2 metric_fixtures", metric_fixtures},
      {"AC3 synthetic_recovery", synthetic_recovery},
      {"AC4 false_alarm_control", false_alarm_control},
      {"AC5 pelt_penalty_monotonicity", pelt_monotonicity},
      {"AC6 feature_determinism_and_invariants", feature_invariants},
      {"AC7 trajectory_oracle", trajectory_oracle},
      {"AC8 ingestion_fixtures", ingestion},
      {"AC9 end_to_end_pipeline", end_to_end},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("%s %s (%s)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

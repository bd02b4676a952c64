// qcpd: command-line driver for ingestion, feature extraction, change-point
// detection, evaluation and the trajectory analysis.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "qcpd/detect.hpp"
#include "qcpd/dump_xml.hpp"
#include "qcpd/harness.hpp"
#include "qcpd/io.hpp"
#include "qcpd/labels.hpp"
#include "qcpd/synth.hpp"
#include "qcpd/trajectory.hpp"

namespace fs = std::filesystem;
using namespace qcpd;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string calendar_start = MonthCalendar::default_calendar().start().str();
  int months = MonthCalendar::kDefaultMonths;
  int threads = 0;

  MonthCalendar calendar() const { return MonthCalendar(YearMonth::parse(calendar_start), months); }
};

void emit(const Json& doc, const std::string& out) {
  if (out.empty() || out == "-") std::cout << doc.dump(2) << '\n';
  else write_json_file(out, doc);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

template <typename T>
Json histogram_json(const std::map<T, long>& h) {
  Json out = Json::object();
  for (const auto& [k, v] : h) {
    std::ostringstream key;
    key << k;
    out[key.str()] = v;
  }
  return out;
}

// Shared options for commands that read a corpus directory.
struct CorpusOptions {
  std::string in;
  int min_changepoints = 1;
  std::string latest_class;
  std::string subset = "all";
  double train_ratio = 0.8;

  void add(CLI::App* cmd) {
    cmd->add_option("--in", in, "Corpus directory")->required();
    cmd->add_option("--min-changepoints", min_changepoints, "Keep articles with at least this many true change points")
        ->capture_default_str();
    cmd->add_option("--latest-class", latest_class, "Keep articles whose latest class is this (FA, AGA, BC, SS)");
    cmd->add_option("--subset", subset, "all, train or test")
        ->check(CLI::IsMember({"all", "train", "test"}))
        ->capture_default_str();
    cmd->add_option("--train-ratio", train_ratio, "Train fraction of the stratified split")->capture_default_str();
  }

  CorpusFilter filter() const {
    CorpusFilter f;
    f.min_changepoints = min_changepoints;
    if (!latest_class.empty()) f.latest_class = parse_quality_class(latest_class);
    return f;
  }

  std::vector<ArticleSeries> load(const Globals& g, Json* meta) const {
    auto corpus = filter_corpus(read_corpus(in), filter());
    if (subset != "all") {
      auto split = split_train_test(corpus, train_ratio, g.seed);
      for (const auto& w : split.warnings) std::cerr << "warning: " << w << '\n';
      corpus = select_articles(corpus, subset == "train" ? split.train : split.test);
    }
    if (meta) {
      (*meta)["corpus"] = in;
      (*meta)["min_changepoints"] = min_changepoints;
      (*meta)["latest_class"] = latest_class.empty() ? Json(nullptr) : Json(latest_class);
      (*meta)["subset"] = subset;
      if (subset != "all") (*meta)["train_ratio"] = train_ratio;
      (*meta)["articles"] = corpus.size();
    }
    return corpus;
  }
};

struct DetectorOptions {
  std::string cost = "rbf";
  double gamma = 0.0;  // 0 = median heuristic
  int n_bkps = 1;
  double pen = 1.0;
  int min_size = 5;
  int permutations = 199;
  double alpha = 0.05;

  void add(CLI::App* cmd) {
    cmd->add_option("--cost", cost, "rbf or l2")->check(CLI::IsMember({"rbf", "l2"}))->capture_default_str();
    cmd->add_option("--gamma", gamma, "RBF bandwidth (0 = median heuristic)")->capture_default_str();
    cmd->add_option("--n-bkps", n_bkps, "BinSeg breakpoints")->capture_default_str();
    cmd->add_option("--pen", pen, "PELT penalty")->capture_default_str();
    cmd->add_option("--min-size", min_size, "ECP minimum segment length")->capture_default_str();
    cmd->add_option("--permutations", permutations, "ECP permutation count")->capture_default_str();
    cmd->add_option("--alpha", alpha, "ECP significance level")->capture_default_str();
  }

  DetectorConfig config(Algorithm algorithm, std::uint64_t seed) const {
    DetectorConfig c;
    c.algorithm = algorithm;
    c.cost.kind = parse_cost_kind(cost);
    if (gamma > 0.0) c.cost.gamma = gamma;
    c.n_bkps = n_bkps;
    c.pen = pen;
    c.ecp.min_size = min_size;
    c.ecp.permutations = permutations;
    c.ecp.alpha = alpha;
    c.ecp.seed = seed;
    return c;
  }
};

Json config_json(const DetectorConfig& c) {
  Json j = {{"algorithm", to_string(c.algorithm)}};
  switch (c.algorithm) {
    case Algorithm::BinSeg:
      j["n_bkps"] = c.n_bkps;
      j["min_size"] = c.binseg_min_size;
      break;
    case Algorithm::Pelt:
      j["pen"] = c.pen;
      j["min_size"] = c.pelt_min_size;
      break;
    case Algorithm::Ecp:
      j["min_size"] = c.ecp.min_size;
      j["permutations"] = c.ecp.permutations;
      j["alpha"] = c.ecp.alpha;
      j["seed"] = c.ecp.seed;
      break;
  }
  if (c.algorithm != Algorithm::Ecp) {
    j["cost"] = to_string(c.cost.kind);
    j["gamma"] = c.cost.gamma ? Json(*c.cost.gamma) : Json("median_heuristic");
  }
  return j;
}

Json report_rows_json(const std::vector<AblationRow>& rows) {
  Json out = Json::array();
  for (const AblationRow& r : rows)
    out.push_back({{"group", r.group},
                   {"detector", r.detector},
                   {"covering", r.report.covering},
                   {"precision", r.report.precision},
                   {"recall", r.report.recall},
                   {"articles", r.report.articles.size()}});
  return out;
}

// ---------------------------------------------------------------- commands

void cmd_ingest(const std::vector<std::string>& xml, const std::string& out, const Globals& g) {
  std::vector<std::vector<DumpPage>> per_file(xml.size());
  parallel_for(xml.size(), g.threads, [&](std::size_t i) {
    auto in = open_in(xml[i]);
    try {
      stream_mediawiki_xml(in, [&](DumpPage&& p) { per_file[i].push_back(std::move(p)); });
    } catch (const XmlParseError& e) {
      throw std::runtime_error(xml[i] + ": " + e.what());
    }
  });
  std::vector<DumpPage> pages;
  for (auto& f : per_file)
    for (auto& p : f) pages.push_back(std::move(p));
  auto histories = assemble_histories(std::move(pages));
  auto os = open_out(out);
  write_revisions_jsonl(os, histories);
  std::cerr << "ingested " << histories.size() << " articles\n";
}

void cmd_labels(const std::string& revisions, const std::string& out) {
  auto in = open_in(revisions);
  auto histories = read_revisions_jsonl(in);
  std::vector<ArticleLabels> labels;
  for (const PageHistory& h : histories)
    labels.push_back({h.article_id, h.creation_time, extract_quality_labels(h.talk_revisions)});
  auto os = open_out(out);
  write_labels_jsonl(os, labels);
  std::cerr << "labels for " << labels.size() << " articles\n";
}

void cmd_features(const std::string& revisions, const std::string& labels_path, const std::string& out,
                  const Globals& g) {
  auto rin = open_in(revisions);
  auto histories = read_revisions_jsonl(rin);
  std::map<std::string, std::vector<QualityLabelEvent>> labels;
  if (!labels_path.empty()) {
    auto lin = open_in(labels_path);
    for (ArticleLabels& a : read_labels_jsonl(lin)) labels[a.article_id] = std::move(a.events);
  }
  MonthCalendar cal = g.calendar();
  std::vector<std::optional<ArticleSeries>> built(histories.size());
  std::vector<std::string> skipped(histories.size());
  parallel_for(histories.size(), g.threads, [&](std::size_t i) {
    const PageHistory& h = histories[i];
    if (h.main_revisions.empty()) {
      skipped[i] = h.article_id + ": no main-page revisions";
      return;
    }
    auto it = labels.find(h.article_id);
    std::span<const QualityLabelEvent> ev;
    if (it != labels.end()) ev = it->second;
    ArticleSeries s = build_series(h, ev, cal);
    if (s.valid_length() == 0) {
      skipped[i] = h.article_id + ": created after the calendar window";
      return;
    }
    built[i] = std::move(s);
  });
  std::vector<ArticleSeries> corpus;
  for (std::size_t i = 0; i < built.size(); ++i) {
    if (built[i]) corpus.push_back(std::move(*built[i]));
    else if (!skipped[i].empty()) std::cerr << "skipped " << skipped[i] << '\n';
  }
  write_corpus(out, corpus);
  write_json_file(fs::path(out) / "ground_truth.json", ground_truth_json(corpus));
  std::cerr << "wrote " << corpus.size() << " series to " << out << '\n';
}

void cmd_detect(const std::string& algo, const std::string& features, const CorpusOptions& co,
                const DetectorOptions& dopt, const std::string& out, const Globals& g) {
  Json meta;
  auto corpus = co.load(g, &meta);
  DetectorConfig config = dopt.config(parse_algorithm(algo), g.seed);
  FeatureGroup group = feature_group(features);
  auto results = detect_corpus(corpus, config, group.columns, g.threads);

  PredictionSet preds;
  Json gammas = Json::object();
  Json warnings = Json::object();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    preds.points[corpus[i].article_id] = results[i].points;
    if (results[i].gamma > 0.0) gammas[corpus[i].article_id] = results[i].gamma;
    if (!results[i].warnings.empty()) warnings[corpus[i].article_id] = results[i].warnings;
  }
  meta["detector"] = config_json(config);
  meta["features"] = group.name;
  meta["seed"] = g.seed;
  if (!gammas.empty()) meta["gamma"] = gammas;
  if (!warnings.empty()) meta["warnings"] = warnings;
  preds.metadata = meta;
  emit(predictions_json(preds), out);
}

void cmd_evaluate(const std::string& gt_path, const std::string& pred_path, int margin, const std::string& op,
                  const std::string& out) {
  auto truth = parse_ground_truth(read_json_file(gt_path));
  auto preds = parse_predictions(read_json_file(pred_path));
  std::vector<ArticleEval> rows;
  for (const auto& [id, points] : preds.points) {
    auto it = truth.find(id);
    if (it == truth.end()) throw std::invalid_argument("no ground truth for " + id);
    const TruthEntry& t = it->second;
    auto local = [&](const ChangePointSet& cal) {
      ChangePointSet l;
      for (int q : cal.points)
        if (q - t.first_valid + 1 > 1 && q - t.first_valid + 1 <= t.length) l.points.push_back(q - t.first_valid + 1);
      return l;
    };
    if (t.length == 0) continue;
    rows.push_back(evaluate_article(id, local(t.points), local(points), t.length, margin, parse_covering_op(op)));
  }
  std::string label = preds.metadata.contains("detector") ? preds.metadata["detector"].value("algorithm", "") : "";
  Json doc = report_json(aggregate_report(std::move(rows), margin, label));
  doc["covering_op"] = op;
  doc["metadata"] = preds.metadata;
  emit(doc, out);
}

void cmd_hybrid(const std::string& binseg, const std::string& pelt, const std::string& ecp, const std::string& out) {
  std::map<Algorithm, EvalReport> reports{{Algorithm::BinSeg, parse_report(read_json_file(binseg))},
                                          {Algorithm::Pelt, parse_report(read_json_file(pelt))},
                                          {Algorithm::Ecp, parse_report(read_json_file(ecp))}};
  Json doc = {{"schema", kReportSchema},
              {"note", "evaluation-time upper bound; selects with ground truth, not a deployable detector"}};
  for (HybridMode mode : {HybridMode::AggregateMax, HybridMode::PerArticleMax})
    doc[std::string(to_string(mode))] = report_json(hybrid_report(reports, mode));
  emit(doc, out);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(' ') == std::string::npos) continue;
    out.push_back(parse_double(item.substr(item.find_first_not_of(' '))));
  }
  return out;
}

void cmd_tune(const std::vector<std::string>& algos, const std::string& features, const CorpusOptions& co,
              const DetectorOptions& dopt, const std::string& pens, const std::string& min_sizes,
              const std::string& n_bkps, const std::string& objective, int margin, const std::string& out,
              const Globals& g) {
  Json meta;
  auto corpus = co.load(g, &meta);
  TuneGrid grid;
  grid.pens = parse_list(pens);
  grid.min_sizes.clear();
  for (double v : parse_list(min_sizes)) grid.min_sizes.push_back(static_cast<int>(v));
  grid.n_bkps.clear();
  for (double v : parse_list(n_bkps)) grid.n_bkps.push_back(static_cast<int>(v));
  grid.objective = parse_objective(objective);
  FeatureGroup group = feature_group(features);

  Json results = Json::array();
  for (const std::string& a : algos) {
    Algorithm algorithm = parse_algorithm(a);
    TuneResult r = tune_hyperparameters(corpus, grid, algorithm, dopt.config(algorithm, g.seed), group.columns, margin,
                                        g.threads);
    Json board = Json::array();
    for (const LeaderboardEntry& e : r.leaderboard)
      board.push_back({{r.param_name, e.param},
                       {"objective", e.objective},
                       {"covering", e.covering},
                       {"precision", e.precision},
                       {"recall", e.recall}});
    results.push_back({{"algorithm", a},
                       {"param", r.param_name},
                       {"best", r.best_param},
                       {"best_config", config_json(r.best)},
                       {"leaderboard", board}});
  }
  meta["features"] = group.name;
  meta["objective"] = objective;
  meta["margin"] = margin;
  meta["seed"] = g.seed;
  emit({{"schema", "qcpd.tune/1"}, {"metadata", meta}, {"results", results}}, out);
}

void cmd_ablate(const std::vector<std::string>& groups, const std::vector<std::string>& algos, const CorpusOptions& co,
                const DetectorOptions& dopt, int margin, const std::string& out, const Globals& g) {
  Json meta;
  auto corpus = co.load(g, &meta);
  std::map<Algorithm, DetectorConfig> detectors;
  Json configs = Json::array();
  for (const std::string& a : algos) {
    Algorithm algorithm = parse_algorithm(a);
    detectors[algorithm] = dopt.config(algorithm, g.seed);
    configs.push_back(config_json(detectors[algorithm]));
  }
  auto rows = run_ablation(corpus, groups, detectors, margin, g.threads);
  meta["detectors"] = configs;
  meta["margin"] = margin;
  meta["seed"] = g.seed;
  emit({{"schema", "qcpd.ablation/1"}, {"metadata", meta}, {"rows", report_rows_json(rows)}}, out);
}

void cmd_trajectory(const std::string& labels_path, const std::string& out) {
  auto in = open_in(labels_path);
  std::vector<QualityTrajectory> corpus;
  for (const ArticleLabels& a : read_labels_jsonl(in))
    corpus.push_back(QualityTrajectory::from_events(a.article_id, a.events, a.creation_time));

  std::map<std::string, long> kinds;
  for (TrajectoryKind k : {TrajectoryKind::OnlyPromotion, TrajectoryKind::OnlyDemotion, TrajectoryKind::Both,
                           TrajectoryKind::NoChange})
    kinds[std::string(to_string(k))] = 0;
  long unlabeled = 0;
  for (const QualityTrajectory& t : corpus) {
    if (t.labeled.empty()) {
      ++unlabeled;
      continue;
    }
    ++kinds[std::string(to_string(classify_trajectory(t)))];
  }
  std::vector<QualityTrajectory> labeled;
  for (const QualityTrajectory& t : corpus)
    if (!t.labeled.empty()) labeled.push_back(t);

  auto stats_json = [](const std::vector<TransitionStat>& stats) {
    Json rows = Json::array();
    for (const TransitionStat& s : stats)
      rows.push_back({{"from", to_string(s.from)},
                      {"to", to_string(s.to)},
                      {"hops", s.hops},
                      {"count", s.count},
                      {"avg_days", s.avg_days},
                      {"sd_days", s.sd_days}});
    return rows;
  };
  Json by_kind = Json::object();
  for (TrajectoryKind k : {TrajectoryKind::OnlyPromotion, TrajectoryKind::OnlyDemotion, TrajectoryKind::Both})
    by_kind[std::string(to_string(k))] = stats_json(transition_stats(labeled, k));

  SwitchHistograms h = switch_histograms(labeled);
  Json switches = {{"by_length", histogram_json(h.by_length)},
                   {"articles_by_count", histogram_json(h.articles_by_count)},
                   {"articles_with_length", histogram_json(h.articles_with_length)},
                   {"articles_with_switches", h.articles_with_switches},
                   {"rapid_threshold_days", SwitchHistograms::kRapidDays},
                   {"rapid_switches", h.rapid_switches},
                   {"articles_with_rapid", h.articles_with_rapid},
                   {"rapid_by_length", histogram_json(h.rapid_by_length)},
                   {"mean_turnaround_days", h.mean_turnaround_days},
                   {"mean_turnaround_length3_days", h.mean_turnaround_length3_days},
                   {"length3_patterns", histogram_json(h.length3_patterns)}};

  Json no_change = Json::array();
  for (const NoChangeStat& s : no_change_stats(labeled))
    no_change.push_back(
        {{"class", to_string(s.quality)}, {"count", s.count}, {"mean_days", s.mean_days}, {"sd_days", s.sd_days}});

  emit({{"schema", "qcpd.trajectory/1"},
        {"articles", corpus.size()},
        {"unlabeled", unlabeled},
        {"kinds", kinds},
        {"transitions", stats_json(transition_stats(labeled))},
        {"transitions_by_kind", by_kind},
        {"switches", switches},
        {"no_change", no_change}},
       out);
}

void cmd_synth(const SynthCorpusSpec& spec, const std::string& out) {
  auto corpus = synth_corpus(spec);
  write_corpus(out, corpus);
  write_json_file(fs::path(out) / "ground_truth.json", ground_truth_json(corpus));
  std::cerr << "wrote " << corpus.size() << " synthetic series to " << out << '\n';
}

void cmd_window_means(const CorpusOptions& co, int window, const std::string& out, const std::string& csv,
                      const Globals& g) {
  Json meta;
  auto corpus = co.load(g, &meta);
  WindowMeans w = change_window_means(corpus, window);
  Json rows = Json::array();
  for (std::size_t r = 0; r < w.means.rows(); ++r) {
    Json row = {{"offset", static_cast<int>(r) - w.change_index}};
    for (std::size_t c = 0; c < w.means.cols(); ++c) row[feature_name(static_cast<int>(c))] = w.means(r, c);
    rows.push_back(row);
  }
  meta["window"] = w.window;
  emit({{"schema", "qcpd.window_means/1"},
        {"metadata", meta},
        {"change_index", w.change_index},
        {"used", w.used},
        {"skipped", w.skipped},
        {"rows", rows}},
       out);
  if (!csv.empty()) {
    auto os = open_out(csv);
    os << "offset";
    for (std::size_t c = 0; c < w.means.cols(); ++c) os << ',' << feature_name(static_cast<int>(c));
    os << '\n';
    for (std::size_t r = 0; r < w.means.rows(); ++r) {
      os << static_cast<int>(r) - w.change_index;
      for (std::size_t c = 0; c < w.means.cols(); ++c) os << ',' << format_double(w.means(r, c));
      os << '\n';
    }
  }
}

void cmd_correlate(const CorpusOptions& co, const std::string& out, const std::string& csv, const Globals& g) {
  Json meta;
  auto corpus = co.load(g, &meta);
  CorrelationResult r = correlation_matrix(corpus);
  Json matrix = Json::array();
  for (std::size_t i = 0; i < r.r.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < r.r.cols(); ++j) row.push_back(r.r(i, j));
    matrix.push_back(row);
  }
  Json names = Json::array();
  for (std::size_t c = 0; c < r.r.cols(); ++c) names.push_back(feature_name(static_cast<int>(c)));
  Json zero = Json::array();
  for (int c : r.zero_variance) zero.push_back(feature_name(c));
  emit({{"schema", "qcpd.correlation/1"},
        {"metadata", meta},
        {"timestamps", r.timestamps},
        {"features", names},
        {"zero_variance", zero},
        {"r", matrix}},
       out);
  if (!csv.empty()) {
    auto os = open_out(csv);
    os << "feature";
    for (const auto& n : names) os << ',' << n.get<std::string>();
    os << '\n';
    for (std::size_t i = 0; i < r.r.rows(); ++i) {
      os << names[i].get<std::string>();
      for (std::size_t j = 0; j < r.r.cols(); ++j) os << ',' << format_double(r.r(i, j));
      os << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quality change-point detection for collaboratively edited articles"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for splits, permutations and synthetic data")->capture_default_str();
  app.add_option("--calendar-start", g.calendar_start, "First calendar month (YYYY-MM)")->capture_default_str();
  app.add_option("--months", g.months, "Calendar length in months")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();

  std::string out;

  auto* ingest = app.add_subcommand("ingest", "Parse MediaWiki XML dumps into revision JSONL");
  std::vector<std::string> xml;
  ingest->add_option("--xml", xml, "Dump files")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", out, "Revision JSONL")->required();

  auto* labels = app.add_subcommand("labels", "Extract quality assessments from talk pages");
  std::string revisions;
  labels->add_option("--revisions", revisions, "Revision JSONL")->required()->check(CLI::ExistingFile);
  labels->add_option("--out", out, "Label JSONL")->required();

  auto* features = app.add_subcommand("features", "Build monthly feature series");
  std::string labels_path;
  features->add_option("--revisions", revisions, "Revision JSONL")->required()->check(CLI::ExistingFile);
  features->add_option("--labels", labels_path, "Label JSONL")->check(CLI::ExistingFile);
  features->add_option("--out", out, "Corpus directory")->required();

  auto* detect_cmd = app.add_subcommand("detect", "Detect change points on a corpus");
  std::string algo = "pelt";
  std::string feature_spec = "all";
  CorpusOptions detect_corpus_opts;
  DetectorOptions detect_opts;
  detect_cmd->add_option("--algo", algo, "binseg, pelt or ecp")
      ->check(CLI::IsMember({"binseg", "pelt", "ecp"}))
      ->capture_default_str();
  detect_cmd->add_option("--features", feature_spec, "Feature group (Gc, Ga, Gp, G1..G8, all, unions with +)")
      ->capture_default_str();
  detect_corpus_opts.add(detect_cmd);
  detect_opts.add(detect_cmd);
  detect_cmd->add_option("--out", out, "Prediction JSON (- for stdout)");

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
  std::string gt_path, pred_path, covering_op = "max";
  int margin = 5;
  evaluate->add_option("--gt", gt_path, "Ground-truth JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--pred", pred_path, "Prediction JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--margin", margin, "Matching margin in months")->capture_default_str();
  evaluate->add_option("--covering-op", covering_op, "max or min")
      ->check(CLI::IsMember({"max", "min"}))
      ->capture_default_str();
  evaluate->add_option("--out", out, "Report JSON (- for stdout)");

  auto* hybrid = app.add_subcommand("hybrid", "Upper-bound ensemble of three evaluation reports");
  std::string binseg_report, pelt_report, ecp_report;
  hybrid->add_option("--binseg", binseg_report, "BinSeg report")->required()->check(CLI::ExistingFile);
  hybrid->add_option("--pelt", pelt_report, "PELT report")->required()->check(CLI::ExistingFile);
  hybrid->add_option("--ecp", ecp_report, "ECP report")->required()->check(CLI::ExistingFile);
  hybrid->add_option("--out", out, "Report JSON (- for stdout)");

  auto* tune = app.add_subcommand("tune", "Grid-search detector hyperparameters");
  std::vector<std::string> algos{"binseg", "pelt", "ecp"};
  std::string pens = "1,2,3,4,5,6,7,8", min_sizes = "2,5,10,15,20", n_bkps = "1,2,3,4,5,6,7,8";
  std::string objective = "covering";
  CorpusOptions tune_corpus_opts;
  tune_corpus_opts.subset = "train";
  DetectorOptions tune_opts;
  tune->add_option("--algo", algos, "Detectors to tune")->capture_default_str();
  tune->add_option("--features", feature_spec, "Feature group")->capture_default_str();
  tune->add_option("--grid-pen", pens, "PELT penalties")->capture_default_str();
  tune->add_option("--grid-min-size", min_sizes, "ECP minimum segment lengths")->capture_default_str();
  tune->add_option("--grid-n-bkps", n_bkps, "BinSeg breakpoint counts")->capture_default_str();
  tune->add_option("--objective", objective, "covering, precision or recall")->capture_default_str();
  tune->add_option("--margin", margin, "Matching margin in months")->capture_default_str();
  tune_corpus_opts.add(tune);
  tune_opts.add(tune);
  tune->add_option("--out", out, "Tuning JSON (- for stdout)");

  auto* ablate = app.add_subcommand("ablate", "Evaluate detectors on feature subsets");
  std::vector<std::string> groups{"Gc", "Ga", "Gp"};
  CorpusOptions ablate_corpus_opts;
  DetectorOptions ablate_opts;
  ablate->add_option("--groups", groups, "Feature groups")->capture_default_str();
  ablate->add_option("--algo", algos, "Detectors")->capture_default_str();
  ablate->add_option("--margin", margin, "Matching margin in months")->capture_default_str();
  ablate_corpus_opts.add(ablate);
  ablate_opts.add(ablate);
  ablate->add_option("--out", out, "Ablation JSON (- for stdout)");

  auto* trajectory = app.add_subcommand("trajectory", "Quality-label trajectory statistics");
  trajectory->add_option("--labels", labels_path, "Label JSONL")->required()->check(CLI::ExistingFile);
  trajectory->add_option("--out", out, "Report JSON (- for stdout)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with known change points");
  SynthCorpusSpec synth_spec;
  synth->add_option("--articles", synth_spec.articles, "Number of series")->capture_default_str();
  synth->add_option("--dims", synth_spec.dims, "Feature dimensions")->capture_default_str();
  synth->add_option("--breaks", synth_spec.n_breaks, "Change points per series")->capture_default_str();
  synth->add_option("--min-gap", synth_spec.min_gap, "Minimum segment length")->capture_default_str();
  synth->add_option("--shift", synth_spec.shift, "Mean step per dimension")->capture_default_str();
  synth->add_option("--noise", synth_spec.noise, "Noise standard deviation")->capture_default_str();
  synth->add_option("--out", out, "Corpus directory")->required();

  auto* window = app.add_subcommand("window-means", "Feature means in a window around change points");
  CorpusOptions window_corpus_opts;
  int window_len = 24;
  std::string csv;
  window_corpus_opts.add(window);
  window->add_option("--window", window_len, "Window length in months")->capture_default_str();
  window->add_option("--csv", csv, "Also write the means as CSV");
  window->add_option("--out", out, "JSON output (- for stdout)");

  auto* correlate = app.add_subcommand("correlate", "Pearson correlation of corpus-averaged features");
  CorpusOptions correlate_corpus_opts;
  correlate_corpus_opts.min_changepoints = 0;
  correlate_corpus_opts.add(correlate);
  correlate->add_option("--out", out, "JSON output (- for stdout)");
  correlate->add_option("--csv", csv, "Also write the matrix as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) cmd_ingest(xml, out, g);
    else if (*labels) cmd_labels(revisions, out);
    else if (*features) cmd_features(revisions, labels_path, out, g);
    else if (*detect_cmd) cmd_detect(algo, feature_spec, detect_corpus_opts, detect_opts, out, g);
    else if (*evaluate) cmd_evaluate(gt_path, pred_path, margin, covering_op, out);
    else if (*hybrid) cmd_hybrid(binseg_report, pelt_report, ecp_report, out);
    else if (*tune)
      cmd_tune(algos, feature_spec, tune_corpus_opts, tune_opts, pens, min_sizes, n_bkps, objective, margin, out, g);
    else if (*ablate) cmd_ablate(groups, algos, ablate_corpus_opts, ablate_opts, margin, out, g);
    else if (*trajectory) cmd_trajectory(labels_path, out);
    else if (*synth) {
      synth_spec.n_months = g.months;
      synth_spec.seed = g.seed;
      cmd_synth(synth_spec, out);
    } else if (*window) cmd_window_means(window_corpus_opts, window_len, out, csv, g);
    else if (*correlate) cmd_correlate(correlate_corpus_opts, out, csv, g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

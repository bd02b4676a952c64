#include "qcpd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <set>
#include <stdexcept>
#include <thread>

#include "qcpd/rng.hpp"

namespace qcpd {

std::vector<ArticleSeries> filter_corpus(std::span<const ArticleSeries> corpus, const CorpusFilter& filter) {
  std::vector<ArticleSeries> out;
  for (const ArticleSeries& s : corpus) {
    if (static_cast<int>(s.ground_truth.size()) < filter.min_changepoints) continue;
    if (filter.latest_class && s.latest_class != filter.latest_class) continue;
    out.push_back(s);
  }
  return out;
}

std::vector<ArticleSeries> select_articles(std::span<const ArticleSeries> corpus, std::span<const std::string> ids) {
  std::set<std::string> wanted(ids.begin(), ids.end());
  std::vector<ArticleSeries> out;
  for (const ArticleSeries& s : corpus)
    if (wanted.count(s.article_id)) out.push_back(s);
  return out;
}

CorpusSplit split_train_test(std::span<const ArticleSeries> corpus, double train_ratio, std::uint64_t seed) {
  if (!(train_ratio > 0.0 && train_ratio <= 1.0)) throw std::invalid_argument("train ratio must lie in (0, 1]");
  std::map<QualityClass, std::vector<std::string>, std::greater<>> by_class;
  for (const ArticleSeries& s : corpus) {
    if (!s.latest_class) throw std::invalid_argument(s.article_id + ": no quality class to stratify on");
    by_class[*s.latest_class].push_back(s.article_id);
  }

  CorpusSplit split;
  split.train_ratio = train_ratio;
  for (auto& [cls, ids] : by_class) {
    std::sort(ids.begin(), ids.end());
    if (ids.size() < 2) {
      split.warnings.push_back("class " + std::string(to_string(cls)) + " has fewer than 2 articles; all go to train");
      split.train.insert(split.train.end(), ids.begin(), ids.end());
      continue;
    }
    Rng rng(derive_seed(seed, to_string(cls)));
    rng.shuffle(std::span<std::string>(ids));
    auto n_test = static_cast<std::size_t>(std::llround((1.0 - train_ratio) * static_cast<double>(ids.size())));
    split.test.insert(split.test.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), ids.begin() + static_cast<std::ptrdiff_t>(n_test), ids.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  if (split.test.empty()) split.warnings.push_back("test set is empty");
  return split;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<DetectionResult> detect_corpus(std::span<const ArticleSeries> corpus, const DetectorConfig& config,
                                           std::span<const int> columns, int threads) {
  std::vector<DetectionResult> out(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    const ArticleSeries& s = corpus[i];
    DetectorConfig local = config;
    local.ecp.seed = derive_seed(config.ecp.seed, s.article_id);
    DetectionResult r = detect(s.detection_input(columns), local);
    r.points = s.to_calendar(r.points);
    out[i] = std::move(r);
  });
  return out;
}

EvalReport evaluate_corpus(std::span<const ArticleSeries> corpus, std::span<const ChangePointSet> predictions,
                           int margin, CoveringOp op, std::string label) {
  if (predictions.size() != corpus.size()) throw std::invalid_argument("one prediction per article is required");
  std::vector<ArticleEval> rows;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const ArticleSeries& s = corpus[i];
    int n = s.valid_length();
    if (n == 0) continue;
    rows.push_back(evaluate_article(s.article_id, s.local_ground_truth(), s.to_local(predictions[i]), n, margin, op));
  }
  return aggregate_report(std::move(rows), margin, std::move(label));
}

Objective parse_objective(std::string_view text) {
  if (text == "covering") return Objective::Covering;
  if (text == "precision") return Objective::Precision;
  if (text == "recall") return Objective::Recall;
  throw std::invalid_argument("unknown objective: " + std::string(text));
}

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::Covering: return "covering";
    case Objective::Precision: return "precision";
    case Objective::Recall: return "recall";
  }
  return "?";
}

double objective_value(const EvalReport& report, Objective objective) {
  switch (objective) {
    case Objective::Covering: return report.covering;
    case Objective::Precision: return report.precision;
    case Objective::Recall: return report.recall;
  }
  return 0.0;
}

namespace {

std::vector<ChangePointSet> points_of(const std::vector<DetectionResult>& results) {
  std::vector<ChangePointSet> out;
  out.reserve(results.size());
  for (const DetectionResult& r : results) out.push_back(r.points);
  return out;
}

}  // namespace

TuneResult tune_hyperparameters(std::span<const ArticleSeries> train, const TuneGrid& grid, Algorithm algorithm,
                                const DetectorConfig& base, std::span<const int> columns, int margin, int threads) {
  if (train.empty()) throw std::invalid_argument("training set is empty");
  std::vector<double> values;
  TuneResult result;
  result.algorithm = algorithm;
  switch (algorithm) {
    case Algorithm::Pelt:
      result.param_name = "pen";
      values = grid.pens;
      break;
    case Algorithm::Ecp:
      result.param_name = "min_size";
      values.assign(grid.min_sizes.begin(), grid.min_sizes.end());
      break;
    case Algorithm::BinSeg:
      result.param_name = "n_bkps";
      values.assign(grid.n_bkps.begin(), grid.n_bkps.end());
      break;
  }
  if (values.empty()) throw std::invalid_argument("hyperparameter grid is empty");

  auto configure = [&](double v) {
    DetectorConfig c = base;
    c.algorithm = algorithm;
    if (algorithm == Algorithm::Pelt) c.pen = v;
    else if (algorithm == Algorithm::Ecp) c.ecp.min_size = static_cast<int>(v);
    else c.n_bkps = static_cast<int>(v);
    return c;
  };

  bool have_best = false;
  double best_objective = 0.0;
  for (double v : values) {
    DetectorConfig c = configure(v);
    EvalReport r = evaluate_corpus(train, points_of(detect_corpus(train, c, columns, threads)), margin);
    LeaderboardEntry e{v, objective_value(r, grid.objective), r.covering, r.precision, r.recall};
    result.leaderboard.push_back(e);
    if (!have_best || e.objective > best_objective || (e.objective == best_objective && v < result.best_param)) {
      have_best = true;
      best_objective = e.objective;
      result.best_param = v;
      result.best = c;
    }
  }
  return result;
}

std::vector<AblationRow> run_ablation(std::span<const ArticleSeries> corpus, std::span<const std::string> groups,
                                      const std::map<Algorithm, DetectorConfig>& detectors, int margin, int threads) {
  if (detectors.empty()) throw std::invalid_argument("no detectors configured");
  std::vector<FeatureGroup> resolved;
  for (const std::string& g : groups) resolved.push_back(feature_group(g));  // rejects unknown names up front

  std::vector<AblationRow> rows;
  for (const FeatureGroup& group : resolved) {
    std::map<Algorithm, EvalReport> reports;
    for (const auto& [algorithm, config] : detectors) {
      DetectorConfig c = config;
      c.algorithm = algorithm;
      auto preds = points_of(detect_corpus(corpus, c, group.columns, threads));
      EvalReport r = evaluate_corpus(corpus, preds, margin, CoveringOp::Max, std::string(to_string(algorithm)));
      rows.push_back({group.name, std::string(to_string(algorithm)), r});
      reports.emplace(algorithm, std::move(r));
    }
    if (reports.size() == 3)
      for (HybridMode mode : {HybridMode::AggregateMax, HybridMode::PerArticleMax}) {
        EvalReport h = hybrid_report(reports, mode);
        rows.push_back({group.name, h.label, std::move(h)});
      }
  }
  return rows;
}

}  // namespace qcpd

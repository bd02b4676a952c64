#pragma once

// Corpus-level experiment driver: filtering, stratified splits, parallel
// detection, evaluation, hyperparameter search and feature ablations.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcpd/detect.hpp"
#include "qcpd/evaluation.hpp"
#include "qcpd/features.hpp"

namespace qcpd {

struct CorpusFilter {
  int min_changepoints = 1;
  std::optional<QualityClass> latest_class;
};

std::vector<ArticleSeries> filter_corpus(std::span<const ArticleSeries> corpus, const CorpusFilter& filter);

/// Articles whose ids appear in `ids`, in corpus order.
std::vector<ArticleSeries> select_articles(std::span<const ArticleSeries> corpus, std::span<const std::string> ids);

struct CorpusSplit {
  std::vector<std::string> train;  // sorted
  std::vector<std::string> test;   // sorted
  double train_ratio = 0.8;
  std::vector<std::string> warnings;
};

/// Stratified by latest class: each class is shuffled with its own derived
/// seed and round((1 - train_ratio) * size) of its articles go to test.
/// Classes with fewer than two articles go entirely to train.
CorpusSplit split_train_test(std::span<const ArticleSeries> corpus, double train_ratio = 0.8, std::uint64_t seed = 0);

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). The first exception by index is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Detection on each article's valid rows restricted to `columns`. Points are
/// returned in calendar month indices. ECP seeds are derived per article from
/// config.ecp.seed.
std::vector<DetectionResult> detect_corpus(std::span<const ArticleSeries> corpus, const DetectorConfig& config,
                                           std::span<const int> columns = {}, int threads = 0);

/// Evaluates calendar-indexed predictions (one per article, same order) on
/// each article's valid span.
EvalReport evaluate_corpus(std::span<const ArticleSeries> corpus, std::span<const ChangePointSet> predictions,
                           int margin, CoveringOp op = CoveringOp::Max, std::string label = {});

enum class Objective { Covering, Precision, Recall };

Objective parse_objective(std::string_view text);
std::string_view to_string(Objective objective);
double objective_value(const EvalReport& report, Objective objective);

struct TuneGrid {
  std::vector<double> pens{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> min_sizes{2, 5, 10, 15, 20};
  std::vector<int> n_bkps{1, 2, 3, 4, 5, 6, 7, 8};
  Objective objective = Objective::Covering;
};

struct LeaderboardEntry {
  double param = 0.0;
  double objective = 0.0;
  double covering = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct TuneResult {
  Algorithm algorithm = Algorithm::Pelt;
  std::string param_name;  // "pen", "min_size" or "n_bkps"
  double best_param = 0.0;
  DetectorConfig best;
  std::vector<LeaderboardEntry> leaderboard;  // grid order
};

/// Evaluates every grid value of the detector's own hyperparameter on `train`
/// and keeps the best mean objective; ties go to the smaller value.
TuneResult tune_hyperparameters(std::span<const ArticleSeries> train, const TuneGrid& grid, Algorithm algorithm,
                                const DetectorConfig& base, std::span<const int> columns, int margin, int threads = 0);

struct AblationRow {
  std::string group;
  std::string detector;  // algorithm name or hybrid mode
  EvalReport report;
};

/// For every feature group, runs each configured detector and evaluates it;
/// when all three detectors are configured, both hybrid rows are added.
std::vector<AblationRow> run_ablation(std::span<const ArticleSeries> corpus, std::span<const std::string> groups,
                                      const std::map<Algorithm, DetectorConfig>& detectors, int margin,
                                      int threads = 0);

}  // namespace qcpd

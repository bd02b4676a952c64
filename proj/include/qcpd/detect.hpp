#pragma once

// Offline change-point detectors. Inputs are the valid rows of a series;
// returned points are 1-based and mark the first row of each new segment.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcpd/cost.hpp"
#include "qcpd/evaluation.hpp"
#include "qcpd/matrix.hpp"
#include "qcpd/model.hpp"

namespace qcpd {

enum class Algorithm { BinSeg, Pelt, Ecp };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view text);

struct EcpOptions {
  int min_size = 5;
  int permutations = 199;
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

struct DetectorConfig {
  Algorithm algorithm = Algorithm::Pelt;
  CostSpec cost;
  int n_bkps = 1;           // BinSeg
  int binseg_min_size = 2;  // BinSeg
  double pen = 1.0;         // PELT
  int pelt_min_size = 1;    // PELT
  EcpOptions ecp;
};

struct DetectionResult {
  ChangePointSet points;
  double gamma = 0.0;  // resolved RBF bandwidth, 0 when unused
  std::vector<std::string> warnings;
};

/// Greedy binary segmentation: `n_bkps` times, split the segment whose best
/// split reduces total cost the most. Ties go to the smallest index. Stops
/// early (with a warning) when no segment can be split.
ChangePointSet detect_binseg(const SegmentCost& cost, int n_bkps, int min_size = 2,
                             std::vector<std::string>* warnings = nullptr);

/// Exact minimizer of sum of segment costs + pen * (number of points), with
/// pruning. Among optimal segmentations the one the unpruned recursion picks
/// is returned (each segment start is the smallest optimal one).
ChangePointSet detect_pelt(const SegmentCost& cost, double pen, int min_size = 1);

struct EcpResult {
  ChangePointSet points;
  std::vector<double> p_values;  // one per tested split, in test order
};

/// Hierarchical divisive segmentation on the energy statistic with
/// permutation-test stopping. Empty when rows < 2 * min_size.
EcpResult detect_ecp(const Matrix& series, const EcpOptions& options);

struct Segmentation {
  ChangePointSet points;
  std::vector<Segment> segments;
  double cost = 0.0;  // penalized
};

/// Unpruned O(N^2) dynamic program for the penalized objective; reference
/// implementation for tests. Rejects series longer than max_n.
Segmentation oracle_optimal_segmentation(const SegmentCost& cost, double pen, int min_size = 1, int max_n = 30);

/// Sum of segment costs plus pen per point.
double penalized_cost(const SegmentCost& cost, const ChangePointSet& points, double pen);

DetectionResult detect(const Matrix& series, const DetectorConfig& config);

enum class HybridMode { AggregateMax, PerArticleMax };

std::string_view to_string(HybridMode mode);

/// Upper-bound ensemble over the three detectors, available only after
/// evaluation against ground truth.
///   AggregateMax:  each corpus-level metric is the maximum of the detectors'
///                  means; rows hold per-article maxima for reference.
///   PerArticleMax: each article takes the best value per metric across
///                  detectors; corpus metrics are means of those rows.
/// Counts in each row come from the detector with the best covering on that
/// article. Throws unless all three detectors are present and the reports
/// cover the same articles.
EvalReport hybrid_report(const std::map<Algorithm, EvalReport>& reports, HybridMode mode);

}  // namespace qcpd

#pragma once

// Synthetic piecewise-constant series with known change points.

#include <cstdint>
#include <string>
#include <vector>

#include "qcpd/features.hpp"
#include "qcpd/rng.hpp"

namespace qcpd {

struct SynthSpec {
  std::string article_id = "synth";
  int n_months = MonthCalendar::kDefaultMonths;
  int dims = kFeatureCount;
  std::vector<int> breaks;  // 1-based first month of each new regime
  Matrix regime_means;      // (breaks + 1) x dims; generated when empty
  double shift = 5.0;       // per-dimension mean step between generated regimes
  double noise = 1.0;       // Gaussian standard deviation
  int min_spacing = 2;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// Regime r has mean regime_means.row(r) (or, when generated, the previous
/// mean plus +/- shift per dimension with random signs); every entry gets
/// independent N(0, noise^2). All months are valid, ground truth = breaks.
/// The calendar starts where the default calendar does.
ArticleSeries synth_generate(const SynthSpec& spec);

/// `count` sorted break positions in 2..n_months with every induced segment
/// at least `min_gap` long, drawn uniformly over such configurations'
/// segment-length compositions.
std::vector<int> random_breaks(Rng& rng, int n_months, int count, int min_gap);

struct SynthCorpusSpec {
  int articles = 50;
  int n_months = MonthCalendar::kDefaultMonths;
  int dims = kFeatureCount;
  int n_breaks = 3;
  int min_gap = 20;
  double shift = 5.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
};

/// Articles "synth-0001".. each generated from its own derived seed.
std::vector<ArticleSeries> synth_corpus(const SynthCorpusSpec& spec);

}  // namespace qcpd

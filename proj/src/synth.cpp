#include "qcpd/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace qcpd {

void SynthSpec::validate() const {
  if (n_months < 2) throw std::invalid_argument("synthetic series need at least 2 months");
  if (dims < 1) throw std::invalid_argument("synthetic series need at least one dimension");
  if (noise < 0.0) throw std::invalid_argument("noise scale must be nonnegative");
  if (min_spacing < 1) throw std::invalid_argument("minimum spacing must be positive");
  int previous = 1;
  for (int b : breaks) {
    if (b <= 1 || b > n_months) throw std::invalid_argument("break " + std::to_string(b) + " outside (1, n_months]");
    if (b - previous < min_spacing)
      throw std::invalid_argument("breaks closer than " + std::to_string(min_spacing) + " months");
    previous = b;
  }
  if (!regime_means.empty() &&
      (regime_means.rows() != breaks.size() + 1 || regime_means.cols() != static_cast<std::size_t>(dims)))
    throw std::invalid_argument("regime means must be (breaks + 1) x dims");
}

ArticleSeries synth_generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const auto d = static_cast<std::size_t>(spec.dims);
  Matrix means = spec.regime_means;
  if (means.empty()) {
    means = Matrix(spec.breaks.size() + 1, d);
    for (std::size_t r = 1; r < means.rows(); ++r)
      for (std::size_t k = 0; k < d; ++k)
        means(r, k) = means(r - 1, k) + ((rng.next() & 1) ? spec.shift : -spec.shift);
  }

  ArticleSeries s;
  s.article_id = spec.article_id;
  s.calendar = MonthCalendar(MonthCalendar::default_calendar().start(), spec.n_months);
  s.matrix = Matrix(static_cast<std::size_t>(spec.n_months), d);
  s.valid.assign(static_cast<std::size_t>(spec.n_months), true);
  s.ground_truth.points = spec.breaks;
  std::size_t regime = 0;
  for (int m = 1; m <= spec.n_months; ++m) {
    while (regime < spec.breaks.size() && m >= spec.breaks[regime]) ++regime;
    for (std::size_t k = 0; k < d; ++k) {
      double eps = spec.noise > 0.0 ? spec.noise * rng.normal() : 0.0;
      s.matrix(static_cast<std::size_t>(m - 1), k) = means(regime, k) + eps;
    }
  }
  return s;
}

std::vector<int> random_breaks(Rng& rng, int n_months, int count, int min_gap) {
  if (count < 0 || min_gap < 1) throw std::invalid_argument("invalid break request");
  int slack = n_months - (count + 1) * min_gap;
  if (slack < 0) throw std::invalid_argument("series too short for the requested breaks");
  // Uniform composition of the slack into count + 1 parts via sorted cuts.
  std::vector<int> cuts(static_cast<std::size_t>(count));
  for (int& c : cuts) c = static_cast<int>(rng.below(static_cast<std::uint64_t>(slack) + 1));
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> breaks;
  for (int i = 0; i < count; ++i) breaks.push_back(1 + (i + 1) * min_gap + cuts[static_cast<std::size_t>(i)]);
  return breaks;
}

std::vector<ArticleSeries> synth_corpus(const SynthCorpusSpec& spec) {
  std::vector<ArticleSeries> out;
  for (int i = 0; i < spec.articles; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "synth-%04d", i + 1);
    Rng rng(derive_seed(spec.seed, id));
    SynthSpec one;
    one.article_id = id;
    one.n_months = spec.n_months;
    one.dims = spec.dims;
    one.breaks = random_breaks(rng, spec.n_months, spec.n_breaks, spec.min_gap);
    one.shift = spec.shift;
    one.noise = spec.noise;
    one.min_spacing = std::max(1, spec.min_gap);
    one.seed = rng.next();
    out.push_back(synth_generate(one));
  }
  return out;
}

}  // namespace qcpd

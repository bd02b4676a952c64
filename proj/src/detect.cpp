#include "qcpd/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qcpd/rng.hpp"

namespace qcpd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ChangePointSet from_breaks(std::vector<std::size_t> breaks) {
  std::sort(breaks.begin(), breaks.end());
  ChangePointSet out;
  for (std::size_t b : breaks) out.points.push_back(static_cast<int>(b) + 1);
  return out;
}

// Last-segment starts recovered from the DP back-pointers.
ChangePointSet backtrack(const std::vector<std::size_t>& last, std::size_t n) {
  std::vector<std::size_t> breaks;
  for (std::size_t t = n; t > 0 && last[t] > 0; t = last[t]) breaks.push_back(last[t]);
  return from_breaks(std::move(breaks));
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::BinSeg: return "binseg";
    case Algorithm::Pelt: return "pelt";
    case Algorithm::Ecp: return "ecp";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view text) {
  if (text == "binseg") return Algorithm::BinSeg;
  if (text == "pelt") return Algorithm::Pelt;
  if (text == "ecp") return Algorithm::Ecp;
  throw std::invalid_argument("unknown algorithm: " + std::string(text));
}

std::string_view to_string(HybridMode mode) {
  return mode == HybridMode::AggregateMax ? "aggregate_max" : "per_article_max";
}

// ---------------------------------------------------------------- BinSeg

namespace {

struct SplitCandidate {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t split = 0;
  double gain = -kInf;
  bool admissible = false;
};

SplitCandidate best_split(const SegmentCost& cost, std::size_t begin, std::size_t end, std::size_t min_size) {
  SplitCandidate c{begin, end, 0, -kInf, false};
  if (end - begin < 2 * min_size) return c;
  double whole = cost(begin, end);
  for (std::size_t t = begin + min_size; t + min_size <= end; ++t) {
    double gain = whole - cost(begin, t) - cost(t, end);
    if (!c.admissible || gain > c.gain) {
      c.split = t;
      c.gain = gain;
      c.admissible = true;
    }
  }
  return c;
}

}  // namespace

ChangePointSet detect_binseg(const SegmentCost& cost, int n_bkps, int min_size, std::vector<std::string>* warnings) {
  const std::size_t n = cost.size();
  if (n_bkps < 1) throw std::invalid_argument("n_bkps must be positive");
  if (min_size < 1) throw std::invalid_argument("min_size must be positive");
  if (n > 0 && static_cast<std::size_t>(n_bkps) >= n) throw std::invalid_argument("n_bkps must be below the series length");
  const auto ms = static_cast<std::size_t>(min_size);
  auto warn = [&](std::string message) {
    if (warnings) warnings->push_back(std::move(message));
  };
  if (n < 2 * ms) {
    warn("series of length " + std::to_string(n) + " is shorter than twice the minimum segment length");
    return {};
  }

  std::vector<SplitCandidate> segments{best_split(cost, 0, n, ms)};
  std::vector<std::size_t> breaks;
  for (int k = 0; k < n_bkps; ++k) {
    // Segments stay sorted by start, so strict comparison keeps the smallest index.
    std::size_t pick = segments.size();
    for (std::size_t s = 0; s < segments.size(); ++s) {
      if (!segments[s].admissible) continue;
      if (pick == segments.size() || segments[s].gain > segments[pick].gain) pick = s;
    }
    if (pick == segments.size()) {
      warn("only " + std::to_string(breaks.size()) + " of " + std::to_string(n_bkps) + " breakpoints are admissible");
      break;
    }
    SplitCandidate chosen = segments[pick];
    breaks.push_back(chosen.split);
    SplitCandidate left = best_split(cost, chosen.begin, chosen.split, ms);
    SplitCandidate right = best_split(cost, chosen.split, chosen.end, ms);
    segments[pick] = left;
    segments.insert(segments.begin() + static_cast<std::ptrdiff_t>(pick) + 1, right);
  }
  return from_breaks(std::move(breaks));
}

// ------------------------------------------------------------------ PELT

ChangePointSet detect_pelt(const SegmentCost& cost, double pen, int min_size) {
  if (!(pen > 0.0)) throw std::invalid_argument("penalty must be positive");
  if (min_size < 1) throw std::invalid_argument("min_size must be positive");
  const std::size_t n = cost.size();
  const auto ms = static_cast<std::size_t>(min_size);
  if (n < ms) return {};

  std::vector<double> f(n + 1, kInf);
  std::vector<std::size_t> last(n + 1, 0);
  f[0] = -pen;

  // A candidate dominated at time t can still end a segment before some
  // T < t + min_size (t itself is not yet admissible there), so it stays
  // usable until then.
  struct Candidate {
    std::size_t start;
    std::size_t expires;  // first T for which it is no longer considered
  };
  std::vector<Candidate> alive{{0, std::numeric_limits<std::size_t>::max()}};
  std::vector<double> value;

  for (std::size_t t = ms; t <= n; ++t) {
    std::erase_if(alive, [t](const Candidate& c) { return c.expires <= t; });
    value.assign(alive.size(), kInf);
    double best = kInf;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < alive.size(); ++k) {
      std::size_t s = alive[k].start;
      if (t - s < ms) continue;
      value[k] = f[s] + cost(s, t);
      double v = value[k] + pen;
      if (v < best) {
        best = v;
        arg = s;
      }
    }
    f[t] = best;
    last[t] = arg;
    if (best == kInf) continue;
    double tol = 1e-9 * std::max(1.0, std::abs(best));
    for (std::size_t k = 0; k < alive.size(); ++k)
      if (t - alive[k].start >= ms && value[k] > best + tol) alive[k].expires = std::min(alive[k].expires, t + ms);
    alive.push_back({t, std::numeric_limits<std::size_t>::max()});
  }
  if (f[n] == kInf) return {};
  return backtrack(last, n);
}

Segmentation oracle_optimal_segmentation(const SegmentCost& cost, double pen, int min_size, int max_n) {
  if (!(pen > 0.0)) throw std::invalid_argument("penalty must be positive");
  if (min_size < 1) throw std::invalid_argument("min_size must be positive");
  const std::size_t n = cost.size();
  if (n > static_cast<std::size_t>(max_n))
    throw std::invalid_argument("oracle limited to series of length " + std::to_string(max_n));
  const auto ms = static_cast<std::size_t>(min_size);

  Segmentation out;
  if (n == 0) return out;
  std::vector<double> f(n + 1, kInf);
  std::vector<std::size_t> last(n + 1, 0);
  f[0] = -pen;
  for (std::size_t t = ms; t <= n; ++t) {
    for (std::size_t s = 0; s + ms <= t; ++s) {
      if (f[s] == kInf) continue;
      double v = f[s] + cost(s, t) + pen;
      if (v < f[t]) {
        f[t] = v;
        last[t] = s;
      }
    }
  }
  if (f[n] == kInf) return out;
  out.points = backtrack(last, n);
  out.segments = partition(out.points, static_cast<int>(n));
  out.cost = penalized_cost(cost, out.points, pen);
  return out;
}

double penalized_cost(const SegmentCost& cost, const ChangePointSet& points, double pen) {
  const int n = static_cast<int>(cost.size());
  double total = 0.0;
  for (const Segment& s : partition(points, n))
    total += cost(static_cast<std::size_t>(s.first - 1), static_cast<std::size_t>(s.last));
  return total + pen * static_cast<double>(points.size());
}

// ------------------------------------------------------------------- ECP

namespace {

// Pairwise Euclidean distances with a 2-D prefix table over a row order.
class EnergyTable {
 public:
  explicit EnergyTable(const Matrix& series) : n_(series.rows()), dist_(n_ * n_, 0.0), prefix_((n_ + 1) * (n_ + 1), 0.0) {
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = a + 1; b < n_; ++b) {
        double d = std::sqrt(squared_distance(series.row(a), series.row(b)));
        dist_[a * n_ + b] = dist_[b * n_ + a] = d;
      }
  }

  void load(std::span<const std::size_t> order) {
    const std::size_t w = n_ + 1;
    for (std::size_t i = 0; i < n_; ++i) {
      double row_sum = 0.0;
      const double* src = dist_.data() + order[i] * n_;
      for (std::size_t j = 0; j < n_; ++j) {
        row_sum += src[order[j]];
        prefix_[(i + 1) * w + (j + 1)] = prefix_[i * w + (j + 1)] + row_sum;
      }
    }
  }

  double block(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const {
    const std::size_t w = n_ + 1;
    return prefix_[r1 * w + c1] - prefix_[r0 * w + c1] - prefix_[r1 * w + c0] + prefix_[r0 * w + c0];
  }

  // Scaled energy divergence between [begin, t) and [t, end).
  double statistic(std::size_t begin, std::size_t t, std::size_t end) const {
    double m = static_cast<double>(t - begin);
    double k = static_cast<double>(end - t);
    double between = block(begin, t, t, end);
    double within_left = block(begin, t, begin, t) / 2.0;
    double within_right = block(t, end, t, end) / 2.0;
    double e = 2.0 * between / (m * k) - within_left / (m * (m - 1) / 2.0) - within_right / (k * (k - 1) / 2.0);
    return m * k / (m + k) * e;
  }

 private:
  std::size_t n_;
  std::vector<double> dist_;
  std::vector<double> prefix_;
};

struct EnergySplit {
  std::size_t split = 0;
  double stat = -kInf;
  bool admissible = false;
};

EnergySplit best_energy_split(const EnergyTable& table, std::size_t begin, std::size_t end, std::size_t min_size) {
  EnergySplit best;
  if (end - begin < 2 * min_size) return best;
  for (std::size_t t = begin + min_size; t + min_size <= end; ++t) {
    double q = table.statistic(begin, t, end);
    if (!best.admissible || q > best.stat) best = {t, q, true};
  }
  return best;
}

}  // namespace

EcpResult detect_ecp(const Matrix& series, const EcpOptions& options) {
  if (options.min_size < 2) throw std::invalid_argument("ECP min_size must be at least 2");
  if (options.permutations < 1) throw std::invalid_argument("ECP needs at least one permutation");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw std::invalid_argument("ECP alpha must lie in (0, 1)");
  const std::size_t n = series.rows();
  const auto ms = static_cast<std::size_t>(options.min_size);
  EcpResult result;
  if (n < 2 * ms) return result;

  EnergyTable table(series);
  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  std::vector<std::size_t> bounds{0, n};  // sorted segment boundaries
  Rng rng(options.seed);
  std::vector<std::size_t> order(n);

  auto best_over_segments = [&](const EnergyTable& t, std::size_t* split) {
    double best = -kInf;
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
      EnergySplit e = best_energy_split(t, bounds[s], bounds[s + 1], ms);
      if (e.admissible && e.stat > best) {
        best = e.stat;
        if (split) *split = e.split;
      }
    }
    return best;
  };

  while (true) {
    table.load(identity);
    std::size_t split = 0;
    double observed = best_over_segments(table, &split);
    if (observed == -kInf) break;

    int exceed = 0;
    for (int r = 0; r < options.permutations; ++r) {
      order = identity;
      for (std::size_t s = 0; s + 1 < bounds.size(); ++s)
        rng.shuffle(std::span<std::size_t>(order.data() + bounds[s], bounds[s + 1] - bounds[s]));
      table.load(order);
      if (best_over_segments(table, nullptr) >= observed) ++exceed;
    }
    double p = static_cast<double>(exceed + 1) / static_cast<double>(options.permutations + 1);
    result.p_values.push_back(p);
    if (!(p < options.alpha)) break;
    bounds.insert(std::upper_bound(bounds.begin(), bounds.end(), split), split);
  }

  std::vector<std::size_t> breaks(bounds.begin() + 1, bounds.end() - 1);
  result.points = from_breaks(std::move(breaks));
  return result;
}

// --------------------------------------------------------------- driver

DetectionResult detect(const Matrix& series, const DetectorConfig& config) {
  DetectionResult out;
  if (series.rows() == 0) {
    out.warnings.push_back("empty series");
    return out;
  }
  switch (config.algorithm) {
    case Algorithm::Pelt: {
      auto cost = make_cost(config.cost, series);
      out.gamma = cost->gamma();
      out.points = detect_pelt(*cost, config.pen, config.pelt_min_size);
      break;
    }
    case Algorithm::BinSeg: {
      auto cost = make_cost(config.cost, series);
      out.gamma = cost->gamma();
      int n = static_cast<int>(series.rows());
      int n_bkps = config.n_bkps;
      if (n_bkps >= n) {
        n_bkps = n - 1;
        out.warnings.push_back("n_bkps reduced to " + std::to_string(n_bkps) + " for a series of length " +
                               std::to_string(n));
      }
      if (n_bkps < 1) {
        out.warnings.push_back("series too short for binary segmentation");
        break;
      }
      out.points = detect_binseg(*cost, n_bkps, config.binseg_min_size, &out.warnings);
      break;
    }
    case Algorithm::Ecp: {
      if (series.rows() < 2 * static_cast<std::size_t>(config.ecp.min_size))
        out.warnings.push_back("series shorter than twice the ECP minimum segment length");
      out.points = detect_ecp(series, config.ecp).points;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------- hybrid

EvalReport hybrid_report(const std::map<Algorithm, EvalReport>& reports, HybridMode mode) {
  const Algorithm order[] = {Algorithm::BinSeg, Algorithm::Pelt, Algorithm::Ecp};
  std::vector<const EvalReport*> parts;
  for (Algorithm a : order) {
    auto it = reports.find(a);
    if (it == reports.end()) throw std::invalid_argument("hybrid needs a report for " + std::string(to_string(a)));
    parts.push_back(&it->second);
  }
  const EvalReport& first = *parts.front();
  for (const EvalReport* r : parts) {
    if (r->margin != first.margin) throw std::invalid_argument("hybrid reports use different margins");
    if (r->articles.size() != first.articles.size())
      throw std::invalid_argument("hybrid reports cover different articles");
    for (std::size_t i = 0; i < first.articles.size(); ++i)
      if (r->articles[i].article_id != first.articles[i].article_id)
        throw std::invalid_argument("hybrid reports cover different articles");
  }

  std::vector<ArticleEval> rows;
  for (std::size_t i = 0; i < first.articles.size(); ++i) {
    const ArticleEval* lead = &parts[0]->articles[i];
    ArticleEval row = *lead;
    for (const EvalReport* r : parts) {
      const ArticleEval& a = r->articles[i];
      row.covering = std::max(row.covering, a.covering);
      row.precision = std::max(row.precision, a.precision);
      row.recall = std::max(row.recall, a.recall);
      if (a.covering > lead->covering) lead = &a;
    }
    row.tp = lead->tp;
    row.fp = lead->fp;
    row.fn = lead->fn;
    rows.push_back(std::move(row));
  }

  std::string label = "hybrid_" + std::string(to_string(mode));
  EvalReport out;
  if (rows.empty()) {
    out.label = label;
    out.margin = first.margin;
  } else {
    out = aggregate_report(std::move(rows), first.margin, label);
  }
  if (mode == HybridMode::AggregateMax) {
    out.covering = out.precision = out.recall = 0.0;
    for (const EvalReport* r : parts) {
      out.covering = std::max(out.covering, r->covering);
      out.precision = std::max(out.precision, r->precision);
      out.recall = std::max(out.recall, r->recall);
    }
  }
  return out;
}

}  // namespace qcpd

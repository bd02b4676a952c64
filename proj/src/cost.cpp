#include "qcpd/cost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qcpd {

std::string_view to_string(CostKind kind) { return kind == CostKind::Rbf ? "rbf" : "l2"; }

CostKind parse_cost_kind(std::string_view text) {
  if (text == "rbf") return CostKind::Rbf;
  if (text == "l2") return CostKind::L2;
  throw std::invalid_argument("unknown cost: " + std::string(text));
}

double median_heuristic_gamma(const Matrix& series) {
  const std::size_t n = series.rows();
  if (n < 2) return 1.0;
  std::vector<double> d;
  d.reserve(n * (n - 1) / 2);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) d.push_back(squared_distance(series.row(a), series.row(b)));
  // Lower median for an even count.
  auto mid = d.begin() + static_cast<std::ptrdiff_t>((d.size() - 1) / 2);
  std::nth_element(d.begin(), mid, d.end());
  double median = *mid;
  if (!(median > 0.0) || !std::isfinite(median)) return 1.0;
  return 1.0 / median;
}

RbfCost::RbfCost(const Matrix& series, std::optional<double> gamma)
    : n_(series.rows()), gamma_(gamma ? *gamma : median_heuristic_gamma(series)) {
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) throw std::invalid_argument("RBF bandwidth must be positive");
  const std::size_t w = n_ + 1;
  prefix_.assign(w * w, 0.0);
  for (std::size_t a = 0; a < n_; ++a) {
    double row_sum = 0.0;
    for (std::size_t b = 0; b < n_; ++b) {
      double k = a == b ? 1.0 : std::exp(-gamma_ * squared_distance(series.row(a), series.row(b)));
      row_sum += k;
      prefix_[(a + 1) * w + (b + 1)] = prefix_[a * w + (b + 1)] + row_sum;
    }
  }
}

double RbfCost::operator()(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > n_) throw std::invalid_argument("empty or out-of-range segment");
  const std::size_t w = n_ + 1;
  double block = prefix_[end * w + end] - prefix_[begin * w + end] - prefix_[end * w + begin] +
                 prefix_[begin * w + begin];
  double len = static_cast<double>(end - begin);
  return std::max(0.0, len - block / len);
}

L2Cost::L2Cost(const Matrix& series) : n_(series.rows()), d_(series.cols()) {
  sum_.assign((n_ + 1) * d_, 0.0);
  sum_sq_.assign(n_ + 1, 0.0);
  for (std::size_t r = 0; r < n_; ++r) {
    double sq = 0.0;
    for (std::size_t k = 0; k < d_; ++k) {
      double v = series(r, k);
      sum_[(r + 1) * d_ + k] = sum_[r * d_ + k] + v;
      sq += v * v;
    }
    sum_sq_[r + 1] = sum_sq_[r] + sq;
  }
}

double L2Cost::operator()(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > n_) throw std::invalid_argument("empty or out-of-range segment");
  double len = static_cast<double>(end - begin);
  double norm_of_sum = 0.0;
  for (std::size_t k = 0; k < d_; ++k) {
    double s = sum_[end * d_ + k] - sum_[begin * d_ + k];
    norm_of_sum += s * s;
  }
  return std::max(0.0, sum_sq_[end] - sum_sq_[begin] - norm_of_sum / len);
}

std::unique_ptr<SegmentCost> make_cost(const CostSpec& spec, const Matrix& series) {
  if (spec.kind == CostKind::Rbf) return std::make_unique<RbfCost>(series, spec.gamma);
  return std::make_unique<L2Cost>(series);
}

double cost_rbf(const Matrix& series, int i, int j, std::optional<double> gamma) {
  if (i < 1 || j <= i || static_cast<std::size_t>(j) > series.rows() + 1)
    throw std::invalid_argument("segment must satisfy 1 <= i < j <= N + 1");
  RbfCost cost(series, gamma);
  return cost(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
}

}  // namespace qcpd

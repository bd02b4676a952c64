#pragma once

// Segment costs for penalized segmentation. Segments are half-open row
// ranges [begin, end) of a series, 0-based.

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "qcpd/matrix.hpp"

namespace qcpd {

enum class CostKind { Rbf, L2 };

std::string_view to_string(CostKind kind);
CostKind parse_cost_kind(std::string_view text);

struct CostSpec {
  CostKind kind = CostKind::Rbf;
  std::optional<double> gamma;  // RBF bandwidth; nullopt = median heuristic
};

/// 1 / median of pairwise squared distances between distinct rows; 1.0 when
/// the median is 0 or there are fewer than two rows.
double median_heuristic_gamma(const Matrix& series);

class SegmentCost {
 public:
  virtual ~SegmentCost() = default;
  /// Cost of rows [begin, end); requires begin < end <= size().
  virtual double operator()(std::size_t begin, std::size_t end) const = 0;
  virtual std::size_t size() const = 0;
  virtual CostKind kind() const = 0;
  /// Resolved RBF bandwidth; 0 for costs without one.
  virtual double gamma() const { return 0.0; }
};

/// Kernel cost (n) - (1/n) * sum_{a,b in segment} exp(-gamma * |y_a - y_b|^2).
/// Gram-matrix prefix sums give O(1) evaluation after O(N^2) setup.
class RbfCost final : public SegmentCost {
 public:
  explicit RbfCost(const Matrix& series, std::optional<double> gamma = std::nullopt);

  double operator()(std::size_t begin, std::size_t end) const override;
  std::size_t size() const override { return n_; }
  CostKind kind() const override { return CostKind::Rbf; }
  double gamma() const override { return gamma_; }

 private:
  std::size_t n_;
  double gamma_;
  std::vector<double> prefix_;  // (n+1) x (n+1): sum of K over [0,i) x [0,j)
};

/// Sum of squared deviations from the segment mean.
class L2Cost final : public SegmentCost {
 public:
  explicit L2Cost(const Matrix& series);

  double operator()(std::size_t begin, std::size_t end) const override;
  std::size_t size() const override { return n_; }
  CostKind kind() const override { return CostKind::L2; }

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<double> sum_;     // (n+1) x d column prefix sums
  std::vector<double> sum_sq_;  // (n+1) prefix sums of squared norms
};

std::unique_ptr<SegmentCost> make_cost(const CostSpec& spec, const Matrix& series);

/// RBF cost of rows i..j-1 with 1-based indices (1 <= i < j <= N + 1).
double cost_rbf(const Matrix& series, int i, int j, std::optional<double> gamma = std::nullopt);

}  // namespace qcpd

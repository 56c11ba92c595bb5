#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace uat {

/// One-hot class labelling of [0,1]^d by an axis-aligned grid.
///
/// Axis k is split by strictly increasing interior cuts in (0, 1) into
/// cuts[k].size() + 1 intervals; cells are half-open [lo, hi) except the
/// last along each axis, which is closed. Cell labels are 1-based and stored
/// row-major over the cell grid (axis 0 varies slowest).
class IndicatorSpec {
 public:
  IndicatorSpec(std::size_t input_dim, std::size_t class_count,
                std::vector<std::vector<double>> axis_cuts, std::vector<int> cell_labels);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t class_count() const noexcept { return class_count_; }
  const std::vector<std::vector<double>>& axis_cuts() const noexcept { return axis_cuts_; }
  const std::vector<int>& cell_labels() const noexcept { return cell_labels_; }

  std::size_t cell_count() const noexcept { return cell_labels_.size(); }
  std::size_t cells_along(std::size_t axis) const { return axis_cuts_[axis].size() + 1; }

  /// Interval [lo, hi] covered by cell index `i` along `axis`.
  double cell_lower(std::size_t axis, std::size_t i) const;
  double cell_upper(std::size_t axis, std::size_t i) const;

  /// Multi-index of a flat cell index, and its Lebesgue volume.
  std::vector<std::size_t> cell_index(std::size_t flat) const;
  double cell_volume(std::size_t flat) const;

  /// Flat index of the cell containing x. Coordinates outside [0,1] fall
  /// into the boundary cells.
  std::size_t locate(std::span<const double> x) const;

  /// 1-based label at x.
  int label_at(std::span<const double> x) const;

  /// f(x): the one-hot vector of length class_count.
  std::vector<double> indicator(std::span<const double> x) const;

  friend bool operator==(const IndicatorSpec&, const IndicatorSpec&) = default;

 private:
  std::size_t input_dim_;
  std::size_t class_count_;
  std::vector<std::vector<double>> axis_cuts_;
  std::vector<int> cell_labels_;
};

}  // namespace uat

#pragma once

#include <cstddef>
#include <vector>

namespace uat {

/// Piecewise-constant function on [0,1]: value values[t] on [cuts[t], cuts[t+1]),
/// the last cell closed. cuts.front() == 0, cuts.back() == 1.
class StepFn1D {
 public:
  StepFn1D(std::vector<double> cuts, std::vector<double> values);

  /// k equal cells with the given values.
  static StepFn1D uniform(std::vector<double> values);

  const std::vector<double>& cuts() const noexcept { return cuts_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t cell_count() const noexcept { return values_.size(); }

  double operator()(double x) const;

  friend bool operator==(const StepFn1D&, const StepFn1D&) = default;

 private:
  std::vector<double> cuts_;
  std::vector<double> values_;
};

/// Continuous piecewise-linear function on [0,1] given by its nodes.
class Cpwl1D {
 public:
  Cpwl1D(std::vector<double> breakpoints, std::vector<double> values);

  static Cpwl1D constant(double value);
  /// Line a*x + b on [0,1].
  static Cpwl1D affine(double slope, double intercept);

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t segment_count() const noexcept { return breakpoints_.size() - 1; }

  /// Linear interpolation; constant extension outside [0,1].
  double operator()(double x) const;

  friend bool operator==(const Cpwl1D&, const Cpwl1D&) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

}  // namespace uat

#include "uat/piecewise.hpp"

#include <algorithm>
#include <cmath>

#include "uat/error.hpp"

namespace uat {

namespace {

void check_partition(const std::vector<double>& points, const char* who) {
  if (points.size() < 2) throw InvalidInputError(std::string(who) + ": need at least two points");
  if (points.front() != 0.0 || points.back() != 1.0) {
    throw InvalidInputError(std::string(who) + ": points must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i] > points[i - 1])) {
      throw InvalidInputError(std::string(who) + ": points must be strictly increasing");
    }
  }
}

void check_finite(const std::vector<double>& values, const char* who) {
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError(std::string(who) + ": non-finite value");
  }
}

}  // namespace

StepFn1D::StepFn1D(std::vector<double> cuts, std::vector<double> values)
    : cuts_(std::move(cuts)), values_(std::move(values)) {
  check_partition(cuts_, "StepFn1D");
  if (values_.size() + 1 != cuts_.size()) {
    throw ShapeError("StepFn1D: need exactly one value per cell");
  }
  check_finite(values_, "StepFn1D");
}

StepFn1D StepFn1D::uniform(std::vector<double> values) {
  const std::size_t k = values.size();
  if (k == 0) throw InvalidInputError("StepFn1D: at least one cell required");
  std::vector<double> cuts(k + 1);
  for (std::size_t t = 0; t <= k; ++t) cuts[t] = static_cast<double>(t) / static_cast<double>(k);
  return StepFn1D(std::move(cuts), std::move(values));
}

double StepFn1D::operator()(double x) const {
  const auto it = std::upper_bound(cuts_.begin() + 1, cuts_.end() - 1, x);
  return values_[static_cast<std::size_t>(it - (cuts_.begin() + 1))];
}

Cpwl1D::Cpwl1D(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  check_partition(breakpoints_, "Cpwl1D");
  if (values_.size() != breakpoints_.size()) {
    throw ShapeError("Cpwl1D: need exactly one value per breakpoint");
  }
  check_finite(values_, "Cpwl1D");
}

Cpwl1D Cpwl1D::constant(double value) { return Cpwl1D({0.0, 1.0}, {value, value}); }

Cpwl1D Cpwl1D::affine(double slope, double intercept) {
  return Cpwl1D({0.0, 1.0}, {intercept, slope + intercept});
}

double Cpwl1D::operator()(double x) const {
  if (x <= 0.0) return values_.front();
  if (x >= 1.0) return values_.back();
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - breakpoints_.begin());
  const std::size_t lo = hi - 1;
  const double x0 = breakpoints_[lo];
  const double x1 = breakpoints_[hi];
  const double s = (x - x0) / (x1 - x0);
  return values_[lo] + s * (values_[hi] - values_[lo]);
}

}  // namespace uat

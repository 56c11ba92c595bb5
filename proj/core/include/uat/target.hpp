#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uat/piecewise.hpp"

namespace uat {

/// A real function on [0,1] to be approximated, plus whatever structure is
/// known about it. Only `eval` is required; the optional fields let the
/// measurement engines pick exact paths and the builder pick analytic bounds.
struct Target1D {
  std::string name;
  std::function<double(double)> eval;

  /// Lipschitz constant on [0,1], when known.
  std::optional<double> lipschitz;
  /// Interior points where f is not smooth (kinks or jumps).
  std::vector<double> kinks;
  /// Points in [0,1] where f is unbounded but integrable.
  std::vector<double> singularities;
  /// Exact integral over [a, b], when known.
  std::function<double(double, double)> integral;

  /// Exact representations, when f is CPWL or piecewise constant.
  std::optional<Cpwl1D> cpwl;
  std::optional<StepFn1D> step;

  double operator()(double x) const { return eval(x); }
};

/// Names accepted by make_target: x, x2, sin2pi, sign, rsqrt.
const std::vector<std::string>& builtin_target_names();

/// Built-in registry. Throws InvalidInputError for unknown names.
///   x       f(x) = x
///   x2      f(x) = x^2
///   sin2pi  f(x) = sin(2 pi x)
///   sign    f(x) = sign(x - 0.5)
///   rsqrt   f(x) = 1 / sqrt(max(x, 1e-4))
Target1D make_target(std::string_view name);

/// Piecewise-linear interpolant of (x, value) samples, extended as a
/// constant outside the sampled range.
Target1D target_from_samples(std::vector<std::pair<double, double>> samples,
                             std::string name = "samples");

/// Reads `x,value` rows (an optional non-numeric header line is skipped).
Target1D load_samples_csv(const std::filesystem::path& path);

}  // namespace uat

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uat/indicator_spec.hpp"
#include "uat/nets.hpp"
#include "uat/piecewise.hpp"
#include "uat/target.hpp"

namespace uat {

enum class L1Method {
  ExactCpwl,           // closed-form integration of piecewise-affine differences
  AdaptiveQuadrature,  // 1-D adaptive quadrature between known breakpoints
  GridQuadrature,      // tensor midpoint rule, cross-check only
  MonteCarlo,          // seeded i.i.d. uniform estimator with 99% CI
};

std::string_view to_string(L1Method method);

/// Measured or computed L1 distance over [0,1]^d.
struct L1Report {
  double value = 0.0;
  L1Method method = L1Method::ExactCpwl;
  /// Samples (Monte Carlo), cells per axis (grid) or segments (1-D engines).
  std::uint64_t n = 0;
  /// 99% normal-approximation half-width; Monte Carlo only.
  std::optional<double> ci_halfwidth;
  std::optional<std::uint64_t> seed;
  /// Absolute error estimate of adaptive quadrature.
  std::optional<double> abs_error;

  /// value plus whatever uncertainty the method carries.
  double upper() const { return value + ci_halfwidth.value_or(0.0) + abs_error.value_or(0.0); }
};

/// Lebesgue measure of each class region of an indicator spec.
struct ClassMeasures {
  std::vector<double> mu;
};

using Field = std::function<double(std::span<const double>)>;
using VectorField = std::function<std::vector<double>(std::span<const double>)>;

/// Z value of the two-sided 99% normal interval.
inline constexpr double kZ99 = 2.576;
/// Kinks closer than this are merged before integration.
inline constexpr double kKinkMergeTolerance = 1e-14;

/// Exact CPWL form of output `output` of a d = 1 net without softmax head,
/// restricted to [0,1].
Cpwl1D net_to_cpwl_1d(const Net& net, std::size_t output = 0);

/// Kink locations of the net in (0,1), sorted and merged.
std::vector<double> net_kinks_1d(const Net& net);

L1Report exact_l1_distance_1d(const Cpwl1D& a, const Cpwl1D& b);
L1Report exact_l1_step_vs_cpwl(const StepFn1D& s, const Cpwl1D& c);

/// ||f - c||_1 on [0,1]: exact when f carries a CPWL or step form, otherwise
/// adaptive quadrature between the union of breakpoints.
L1Report l1_distance_1d(const Target1D& f, const Cpwl1D& c);

/// ||f - s||_1 on [0,1] for a step function s, cell by cell.
L1Report l1_distance_1d(const Target1D& f, const StepFn1D& s);

/// Per-class || softmax(g)_i - f_i ||_1 for a d = 1 softmax-head net. Exact
/// on segments where all logits are constant, adaptive quadrature elsewhere.
std::vector<L1Report> l1_softmax_vs_indicator_1d(const Net& net, const IndicatorSpec& spec);

/// Midpoint tensor rule with `resolution` cells per axis, d <= 3.
L1Report grid_l1_distance(const Field& f, const Field& g, std::size_t dim,
                          std::size_t resolution);

/// Uniform i.i.d. Monte Carlo on [0,1]^d, deterministic in `seed`.
L1Report mc_l1_distance(const Field& f, const Field& g, std::size_t dim, std::uint64_t samples,
                        std::uint64_t seed);

/// Component-wise Monte Carlo for vector-valued f and g of length m sharing
/// one sample set.
std::vector<L1Report> mc_l1_distance(const VectorField& f, const VectorField& g, std::size_t dim,
                                     std::size_t components, std::uint64_t samples,
                                     std::uint64_t seed);

/// Component-wise grid rule, d <= 3.
std::vector<L1Report> grid_l1_distance(const VectorField& f, const VectorField& g,
                                       std::size_t dim, std::size_t components,
                                       std::size_t resolution);

ClassMeasures class_measures(const IndicatorSpec& spec);

}  // namespace uat

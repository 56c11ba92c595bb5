#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "uat/certificate.hpp"
#include "uat/fitnd.hpp"
#include "uat/indicator_spec.hpp"
#include "uat/measure.hpp"
#include "uat/nets.hpp"
#include "uat/piecewise.hpp"

namespace uat {

/// Rewrites every sigma1 unit as relu(t + 0.5) - relu(t - 0.5). The result
/// has 2n hidden units: units 0..n-1 keep (w_j, b_j + 0.5, a_ij), units
/// n..2n-1 carry (w_j, b_j - 0.5, -a_ij). The softmax flag is copied.
/// Throws InvalidInputError for a ReLU net.
Net sigma1_expand_to_relu(const Net& net);

/// Block-diagonal union of two nets over one input: hidden units of `first`
/// followed by those of `second`, outputs of `first` followed by those of
/// `second`, exact zeros in the off-diagonal output blocks.
Net stack_outputs(const Net& first, const Net& second);

/// Scaled one-hot target f'_i = (2m/eps)(f_i - 1/2): +m/eps on the class's
/// own region, -m/eps elsewhere.
class IndicatorLogits {
 public:
  IndicatorLogits(IndicatorSpec spec, double eps);

  const IndicatorSpec& spec() const noexcept { return spec_; }
  double eps() const noexcept { return eps_; }
  double scale() const noexcept { return scale_; }
  double high() const noexcept { return 0.5 * scale_; }
  double low() const noexcept { return -0.5 * scale_; }

  std::vector<double> operator()(std::span<const double> x) const;

  /// Class `i` (0-based) as a step function; 1-D specs only.
  StepFn1D class_step(std::size_t i) const;

 private:
  IndicatorSpec spec_;
  double eps_;
  double scale_;
};

IndicatorLogits indicator_logits(const IndicatorSpec& spec, double eps);

/// || softmax(f')_i - f_i ||_1 for a class of measure mu among m classes:
///   [mu (m-1) + (1 - mu)] / (exp(2m/eps) + m - 1).
double indicator_error_closed_form(double mu, std::size_t m, double eps);

/// Per-class closed-form error for a spec.
std::vector<double> indicator_error_closed_form(const IndicatorSpec& spec, double eps);

struct SoftmaxTailBound {
  /// m exp(-2m/eps): bounds every per-class closed-form error.
  double tail_bound = 0.0;
  /// eps / 2, which tail_bound never exceeds since exp(-x) <= 1/x.
  double guarantee = 0.0;
  /// m exp(-2 eps/m): the same expression with the exponent inverted, kept
  /// for reference only.
  double inverted_exponent_bound = 0.0;
};

SoftmaxTailBound softmax_tail_bound(std::size_t m, double eps);

/// Constructive d = 1 backend: exact logit steps, sigma1 ramps, stacking and
/// ReLU expansion. Produces a certified certificate.
struct ConstructiveBackend {};

/// Random-feature backend for any d. Produces a measured certificate.
struct RandomFeatureBackend {
  FitConfig config;
};

using IndicatorBackend = std::variant<ConstructiveBackend, RandomFeatureBackend>;

struct SoftmaxIndicatorBuild {
  Net net;  // ReLU with softmax head
  ApproxCertificate certificate;
  /// Per-class || softmax(g)_i - f_i ||_1 as measured.
  std::vector<L1Report> per_class;
};

/// Builds a softmax-head ReLU net whose every class error is below eps,
/// splitting eps into eps/2 for the logit approximation stage and eps/2 for
/// the softmax tail. The constructive backend keeps the logits exactly equal
/// to f' outside ramp windows of total measure <= eps/(4m) per class.
/// Throws BudgetInfeasibleError (carrying the worst class error) when a
/// class misses eps.
SoftmaxIndicatorBuild build_softmax_indicator_net(const IndicatorSpec& spec, double eps,
                                                  const IndicatorBackend& backend = ConstructiveBackend{});

}  // namespace uat

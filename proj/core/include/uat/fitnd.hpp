#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "uat/indicator_spec.hpp"
#include "uat/measure.hpp"
#include "uat/nets.hpp"

namespace uat {

/// Random-feature least-squares configuration. Hidden weights are drawn
/// uniformly from [-s, s], biases from [-s sqrt(d), s sqrt(d)]; training
/// points are uniform on [0,1]^d. All draws are counter-based in `seed`.
struct FitConfig {
  std::size_t hidden_count = 64;
  double weight_scale = 4.0;
  std::uint64_t seed = 0;
  /// Ridge weight of the objective (1/N)||Phi a - y||^2 + ridge ||a||^2.
  double ridge = 1e-8;
  std::size_t train_samples = 4096;
  /// Fresh Monte Carlo points for the post-fit L1 report.
  std::uint64_t eval_samples = 100000;
};

struct FitResult {
  Net net;
  /// Per-output Monte Carlo ||g_i - f_i||_1 on fresh points.
  std::vector<L1Report> reports;
  /// Ridge actually used after any fallback increases.
  double ridge_used = 0.0;
  /// sup |gradient| of the regularized objective at the solution, and the
  /// magnitude of the terms it cancels (for relative checks).
  double gradient_sup = 0.0;
  double objective_scale = 0.0;
};

/// Shared random hidden layer, one least-squares solve per output (all
/// outputs share one factorization). Throws SolverError when the normal
/// equations are singular at ridge 0; at positive ridge the ridge is raised
/// 10x at a time up to 1e-2 before giving up.
FitResult fit_random_features(const VectorField& f, std::size_t dim, std::size_t outputs,
                              const FitConfig& config);

FitResult fit_random_features(const Field& f, std::size_t dim, const FitConfig& config);

struct IndicatorFit {
  Net net;  // ReLU with softmax head
  /// Per-class Monte Carlo || softmax(g)_i - f_i ||_1.
  std::vector<L1Report> per_class;
  /// Per-class Monte Carlo || softmax(g)_i - softmax(f')_i ||_1 (logit-fit stage).
  std::vector<L1Report> fit_stage;
  double ridge_used = 0.0;
  /// Every class satisfies value + CI half-width < eps.
  bool success = false;
};

/// Fits the scaled logits f'_i = (2m/eps)(f_i - 1/2) and attaches a softmax
/// head. Never throws for an accuracy miss: `success` reports it.
IndicatorFit fit_indicator_softmax(const IndicatorSpec& spec, double eps, const FitConfig& config);

/// Hidden layer drawn for `config` (used by the fitter; exposed for tests).
Net random_feature_layer(std::size_t dim, std::size_t outputs, const FitConfig& config);

}  // namespace uat

#include "uat/fitnd.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

#include "detail/parallel.hpp"
#include "uat/error.hpp"
#include "uat/random.hpp"
#include "uat/surgery.hpp"

namespace uat {

namespace {

constexpr double kMaxRidge = 1e-2;
constexpr int kRefinementSteps = 2;

void check_config(const FitConfig& config, std::size_t dim) {
  if (dim == 0) throw ShapeError("fit_random_features: dimension must be positive");
  if (config.hidden_count == 0) throw DomainError("fit_random_features: hidden_count must be >= 1");
  if (!(config.ridge >= 0.0) || !std::isfinite(config.ridge)) {
    throw DomainError("fit_random_features: ridge must be a finite value >= 0");
  }
  if (!(config.weight_scale > 0.0) || !std::isfinite(config.weight_scale)) {
    throw DomainError("fit_random_features: weight scale must be positive");
  }
  if (config.train_samples == 0) throw DomainError("fit_random_features: need training samples");
}

struct Solution {
  Eigen::MatrixXd coefficients;  // n x m
  double ridge = 0.0;
  double gradient_sup = 0.0;
  double objective_scale = 0.0;
};

// Solves (Phi^T Phi / N + ridge I) X = Phi^T Y / N by Cholesky with a couple
// of rounds of iterative refinement.
Solution solve_ridge(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& y, double ridge) {
  const double inv_n = 1.0 / static_cast<double>(phi.rows());
  const Eigen::MatrixXd gram = (phi.transpose() * phi) * inv_n;
  const Eigen::MatrixXd rhs = (phi.transpose() * y) * inv_n;
  const auto n = gram.rows();

  const bool fallback_allowed = ridge > 0.0;
  for (double lambda = ridge;; lambda *= 10.0) {
    Eigen::MatrixXd system = gram;
    system.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    const bool ok = llt.info() == Eigen::Success &&
                    llt.rcond() > std::numeric_limits<double>::epsilon();
    if (ok) {
      Eigen::MatrixXd x = llt.solve(rhs);
      for (int step = 0; step < kRefinementSteps; ++step) {
        const Eigen::MatrixXd residual = rhs - system * x;
        x += llt.solve(residual);
      }
      Solution s;
      s.coefficients = std::move(x);
      s.ridge = lambda;
      const Eigen::MatrixXd gradient = system * s.coefficients - rhs;
      s.gradient_sup = gradient.cwiseAbs().maxCoeff();
      const Eigen::MatrixXd terms = system.cwiseAbs() * s.coefficients.cwiseAbs();
      s.objective_scale = std::max(terms.maxCoeff(), rhs.cwiseAbs().maxCoeff());
      return s;
    }
    if (!fallback_allowed) {
      throw SolverError(
          "fit_random_features: normal equations are singular at ridge 0; use a ridge > 0");
    }
    if (lambda * 10.0 > kMaxRidge * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "fit_random_features: factorization failed up to ridge " << lambda << " (n = " << n
          << ")";
      throw SolverError(msg.str());
    }
  }
}

}  // namespace

Net random_feature_layer(std::size_t dim, std::size_t outputs, const FitConfig& config) {
  check_config(config, dim);
  const std::size_t n = config.hidden_count;
  const double s = config.weight_scale;
  const double bias_scale = s * std::sqrt(static_cast<double>(dim));
  std::vector<double> weights(n * dim);
  std::vector<double> biases(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < dim; ++k) {
      const double u = counter_uniform(config.seed, streams::kHiddenWeights, j * dim + k);
      weights[j * dim + k] = -s + 2.0 * s * u;
    }
    const double u = counter_uniform(config.seed, streams::kHiddenBiases, j);
    biases[j] = -bias_scale + 2.0 * bias_scale * u;
  }
  return Net(dim, n, outputs, std::move(weights), std::move(biases),
             std::vector<double>(outputs * n, 0.0), ActivationKind::ReLU);
}

FitResult fit_random_features(const VectorField& f, std::size_t dim, std::size_t outputs,
                              const FitConfig& config) {
  check_config(config, dim);
  if (outputs == 0) throw ShapeError("fit_random_features: need at least one output");
  const Net layer = random_feature_layer(dim, outputs, config);
  const std::size_t n = config.hidden_count;
  const std::size_t samples = config.train_samples;

  Eigen::MatrixXd phi(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(n));
  Eigen::MatrixXd y(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(outputs));
  detail::parallel_for(samples, [&](std::size_t i) {
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] = counter_uniform(config.seed, streams::kTrainingSamples, i * dim + k);
    }
    const std::vector<double> h = hidden_activations(layer, x);
    const std::vector<double> target = f(x);
    if (target.size() != outputs) {
      throw ShapeError("fit_random_features: target returned wrong number of components");
    }
    const auto row = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < n; ++j) phi(row, static_cast<Eigen::Index>(j)) = h[j];
    for (std::size_t o = 0; o < outputs; ++o) y(row, static_cast<Eigen::Index>(o)) = target[o];
  });

  const Solution solution = solve_ridge(phi, y, config.ridge);
  std::vector<double> alphas(outputs * n);
  for (std::size_t o = 0; o < outputs; ++o) {
    for (std::size_t j = 0; j < n; ++j) {
      alphas[o * n + j] = solution.coefficients(static_cast<Eigen::Index>(j),
                                                static_cast<Eigen::Index>(o));
    }
  }
  Net net = layer.with_output_weights(outputs, std::move(alphas));

  FitResult result{std::move(net), {}, solution.ridge, solution.gradient_sup,
                   solution.objective_scale};
  if (config.eval_samples > 0) {
    const Net& fitted = result.net;
    const VectorField g = [&fitted](std::span<const double> x) { return eval_logits(fitted, x); };
    result.reports = mc_l1_distance(f, g, dim, outputs, config.eval_samples, config.seed);
  }
  return result;
}

FitResult fit_random_features(const Field& f, std::size_t dim, const FitConfig& config) {
  const VectorField vf = [&f](std::span<const double> x) { return std::vector<double>{f(x)}; };
  return fit_random_features(vf, dim, 1, config);
}

IndicatorFit fit_indicator_softmax(const IndicatorSpec& spec, double eps, const FitConfig& config) {
  const IndicatorLogits logits = indicator_logits(spec, eps);
  const std::size_t m = spec.class_count();
  const std::size_t dim = spec.input_dim();

  FitConfig train = config;
  train.eval_samples = 0;
  const VectorField target = [&logits](std::span<const double> x) { return logits(x); };
  FitResult fitted = fit_random_features(target, dim, m, train);

  IndicatorFit out{fitted.net.with_softmax_head(true), {}, {}, fitted.ridge_used, false};
  const Net& net = out.net;
  const VectorField model = [&net](std::span<const double> x) { return eval_net(net, x); };
  const VectorField onehot = [&spec](std::span<const double> x) { return spec.indicator(x); };
  const VectorField ideal = [&logits](std::span<const double> x) { return softmax(logits(x)); };
  const std::uint64_t samples = std::max<std::uint64_t>(config.eval_samples, 100);
  out.per_class = mc_l1_distance(model, onehot, dim, m, samples, config.seed);
  out.fit_stage = mc_l1_distance(model, ideal, dim, m, samples, config.seed);
  out.success = true;
  for (const auto& r : out.per_class) out.success = out.success && r.upper() < eps;
  return out;
}

}  // namespace uat

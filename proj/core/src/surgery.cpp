#include "uat/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "uat/approx1d.hpp"
#include "uat/error.hpp"

namespace uat {

namespace {

void require_eps(double eps, const char* who) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw DomainError(std::string(who) + ": eps must be positive and finite");
  }
}

}  // namespace

Net sigma1_expand_to_relu(const Net& net) {
  if (net.activation() != ActivationKind::Sigma1) {
    throw InvalidInputError("sigma1_expand_to_relu: input must use the sigma1 activation");
  }
  const std::size_t n = net.hidden_count();
  const std::size_t d = net.input_dim();
  const std::size_t m = net.output_count();

  std::vector<double> weights(2 * n * d);
  std::vector<double> biases(2 * n);
  std::vector<double> alphas(m * 2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = net.hidden_row(j);
    std::copy(row.begin(), row.end(), weights.begin() + static_cast<std::ptrdiff_t>(j * d));
    std::copy(row.begin(), row.end(), weights.begin() + static_cast<std::ptrdiff_t>((n + j) * d));
    biases[j] = net.hidden_bias(j) + 0.5;
    biases[n + j] = net.hidden_bias(j) - 0.5;
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      alphas[i * 2 * n + j] = net.output_weight(i, j);
      alphas[i * 2 * n + n + j] = -net.output_weight(i, j);
    }
  }
  return Net(d, 2 * n, m, std::move(weights), std::move(biases), std::move(alphas),
             ActivationKind::ReLU, net.softmax_head());
}

Net stack_outputs(const Net& first, const Net& second) {
  if (first.input_dim() != second.input_dim()) {
    throw InvalidInputError("stack_outputs: operands have different input dimensions");
  }
  if (first.activation() != second.activation()) {
    throw InvalidInputError("stack_outputs: operands use different activations");
  }
  if (first.softmax_head() || second.softmax_head()) {
    throw InvalidInputError("stack_outputs: operands must not carry a softmax head");
  }
  const std::size_t n1 = first.hidden_count();
  const std::size_t n2 = second.hidden_count();
  const std::size_t m1 = first.output_count();
  const std::size_t m2 = second.output_count();
  const std::size_t n = n1 + n2;

  std::vector<double> weights = first.hidden_weights();
  weights.insert(weights.end(), second.hidden_weights().begin(), second.hidden_weights().end());
  std::vector<double> biases = first.hidden_biases();
  biases.insert(biases.end(), second.hidden_biases().begin(), second.hidden_biases().end());

  std::vector<double> alphas((m1 + m2) * n, 0.0);
  for (std::size_t i = 0; i < m1; ++i) {
    const auto row = first.output_row(i);
    std::copy(row.begin(), row.end(), alphas.begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  for (std::size_t i = 0; i < m2; ++i) {
    const auto row = second.output_row(i);
    std::copy(row.begin(), row.end(),
              alphas.begin() + static_cast<std::ptrdiff_t>((m1 + i) * n + n1));
  }
  return Net(first.input_dim(), n, m1 + m2, std::move(weights), std::move(biases),
             std::move(alphas), first.activation(), false);
}

IndicatorLogits::IndicatorLogits(IndicatorSpec spec, double eps)
    : spec_(std::move(spec)), eps_(eps), scale_(0.0) {
  require_eps(eps, "indicator_logits");
  scale_ = 2.0 * static_cast<double>(spec_.class_count()) / eps;
}

std::vector<double> IndicatorLogits::operator()(std::span<const double> x) const {
  std::vector<double> out(spec_.class_count(), low());
  out[static_cast<std::size_t>(spec_.label_at(x) - 1)] = high();
  return out;
}

StepFn1D IndicatorLogits::class_step(std::size_t i) const {
  if (spec_.input_dim() != 1) throw InvalidInputError("class_step: spec must be 1-D");
  if (i >= spec_.class_count()) throw ShapeError("class_step: class index out of range");
  std::vector<double> cuts{0.0};
  cuts.insert(cuts.end(), spec_.axis_cuts()[0].begin(), spec_.axis_cuts()[0].end());
  cuts.push_back(1.0);
  std::vector<double> values;
  values.reserve(spec_.cell_count());
  for (int label : spec_.cell_labels()) {
    values.push_back(static_cast<std::size_t>(label - 1) == i ? high() : low());
  }
  return StepFn1D(std::move(cuts), std::move(values));
}

IndicatorLogits indicator_logits(const IndicatorSpec& spec, double eps) {
  return IndicatorLogits(spec, eps);
}

double indicator_error_closed_form(double mu, std::size_t m, double eps) {
  require_eps(eps, "indicator_error_closed_form");
  if (m < 2) throw DomainError("indicator_error_closed_form: need m >= 2");
  const double md = static_cast<double>(m);
  // Divide through by exp(2m/eps) so large m/eps underflows to 0 instead of
  // overflowing.
  const double decay = std::exp(-2.0 * md / eps);
  const double numerator = mu * (md - 1.0) + (1.0 - mu);
  return numerator * decay / (1.0 + (md - 1.0) * decay);
}

std::vector<double> indicator_error_closed_form(const IndicatorSpec& spec, double eps) {
  const ClassMeasures measures = class_measures(spec);
  std::vector<double> out;
  out.reserve(measures.mu.size());
  for (double mu : measures.mu) {
    out.push_back(indicator_error_closed_form(mu, spec.class_count(), eps));
  }
  return out;
}

SoftmaxTailBound softmax_tail_bound(std::size_t m, double eps) {
  require_eps(eps, "softmax_tail_bound");
  if (m < 2) throw DomainError("softmax_tail_bound: need m >= 2");
  const double md = static_cast<double>(m);
  SoftmaxTailBound b;
  b.tail_bound = md * std::exp(-2.0 * md / eps);
  b.guarantee = 0.5 * eps;
  b.inverted_exponent_bound = md * std::exp(-2.0 * eps / md);
  return b;
}

namespace {

void add_tail_details(ApproxCertificate& cert, const IndicatorSpec& spec, double eps,
                      const std::vector<double>& closed) {
  const SoftmaxTailBound tail = softmax_tail_bound(spec.class_count(), eps);
  cert.details.emplace_back("tail_bound", tail.tail_bound);
  cert.details.emplace_back("tail_bound_inverted_exponent", tail.inverted_exponent_bound);
  for (std::size_t i = 0; i < closed.size(); ++i) {
    cert.details.emplace_back("closed_form_class_" + std::to_string(i + 1), closed[i]);
  }
}

void add_measured_details(ApproxCertificate& cert, const std::vector<L1Report>& per_class) {
  double sum = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < per_class.size(); ++i) {
    cert.details.emplace_back("measured_class_" + std::to_string(i + 1), per_class[i].value);
    sum += per_class[i].value;
    worst = std::max(worst, per_class[i].upper());
  }
  cert.details.emplace_back("measured_max", worst);
  cert.details.emplace_back("measured_sum", sum);
}

double worst_upper(const std::vector<L1Report>& reports) {
  double worst = 0.0;
  for (const auto& r : reports) worst = std::max(worst, r.upper());
  return worst;
}

SoftmaxIndicatorBuild build_constructive(const IndicatorSpec& spec, double eps) {
  if (spec.input_dim() != 1) {
    throw InvalidInputError(
        "build_softmax_indicator_net: the constructive backend needs a 1-D spec; use the "
        "random-feature backend for d >= 2");
  }
  const std::size_t m = spec.class_count();
  const double md = static_cast<double>(m);
  const IndicatorLogits logits(spec, eps);

  // Mixed criterion for the logit stage: sup error <= eps/4 off an exception
  // set of measure <= eps/(4m) per class. Ramps are exact off their windows,
  // so only the window measure is spent.
  const double sup_budget = 0.25 * eps;
  const double measure_budget = 0.25 * eps / md;
  const double jump = logits.scale();  // |high - low|

  std::optional<Net> stacked;
  double window_total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const StepFn1D step = logits.class_step(i);
    // Ramp L1 budget B gives windows of total length 4B/|h|.
    Sigma1Construction part = step_to_sigma1_net(step, measure_budget * jump / 4.0);
    if (part.window_measure > measure_budget) {
      part = step_to_sigma1_net(step, measure_budget * jump / 4.0 *
                                          (measure_budget / part.window_measure) * 0.999);
    }
    window_total += part.window_measure;
    stacked = stacked ? stack_outputs(*stacked, part.net) : part.net;
  }
  Net net = sigma1_expand_to_relu(*stacked).with_softmax_head(true);

  const std::vector<double> closed = indicator_error_closed_form(spec, eps);
  SoftmaxIndicatorBuild out{std::move(net), {}, {}};
  out.per_class = l1_softmax_vs_indicator_1d(out.net, spec);

  ApproxCertificate& cert = out.certificate;
  cert.requested_eps = eps;
  cert.mode = CertificateMode::Certified;
  // Off the windows the logits equal f' exactly (sup error 0); on them the
  // per-class softmax gap is at most 1.
  cert.stages.push_back({"logit_fit", 0.5 * eps, 0.0 + window_total});
  cert.stages.push_back({"softmax_tail", 0.5 * eps, *std::max_element(closed.begin(), closed.end())});
  cert.details.emplace_back("sup_budget", sup_budget);
  cert.details.emplace_back("measure_budget_per_class", measure_budget);
  cert.details.emplace_back("window_measure_total", window_total);
  cert.details.emplace_back("hidden_units", static_cast<double>(out.net.hidden_count()));
  add_tail_details(cert, spec, eps, closed);
  add_measured_details(cert, out.per_class);

  const double worst = worst_upper(out.per_class);
  if (!(worst < eps) || !cert.consistent()) {
    std::ostringstream msg;
    msg << "build_softmax_indicator_net: worst class error " << worst << " is not below eps "
        << eps;
    throw BudgetInfeasibleError(msg.str(), worst);
  }
  return out;
}

SoftmaxIndicatorBuild build_random_feature(const IndicatorSpec& spec, double eps,
                                           const FitConfig& config) {
  IndicatorFit fit = fit_indicator_softmax(spec, eps, config);
  const std::vector<double> closed = indicator_error_closed_form(spec, eps);

  SoftmaxIndicatorBuild out{std::move(fit.net), {}, std::move(fit.per_class)};
  ApproxCertificate& cert = out.certificate;
  cert.requested_eps = eps;
  cert.mode = CertificateMode::Measured;
  cert.stages.push_back({"logit_fit", 0.5 * eps, worst_upper(fit.fit_stage)});
  cert.stages.push_back({"softmax_tail", 0.5 * eps, *std::max_element(closed.begin(), closed.end())});
  cert.details.emplace_back("hidden_units", static_cast<double>(out.net.hidden_count()));
  cert.details.emplace_back("ridge_used", fit.ridge_used);
  add_tail_details(cert, spec, eps, closed);
  add_measured_details(cert, out.per_class);

  const double worst = worst_upper(out.per_class);
  if (!fit.success) {
    std::ostringstream msg;
    msg << "build_softmax_indicator_net: random-feature fit reached worst class error " << worst
        << ", not below eps " << eps;
    throw BudgetInfeasibleError(msg.str(), worst);
  }
  return out;
}

}  // namespace

SoftmaxIndicatorBuild build_softmax_indicator_net(const IndicatorSpec& spec, double eps,
                                                  const IndicatorBackend& backend) {
  require_eps(eps, "build_softmax_indicator_net");
  if (const auto* rf = std::get_if<RandomFeatureBackend>(&backend)) {
    return build_random_feature(spec, eps, rf->config);
  }
  return build_constructive(spec, eps);
}

}  // namespace uat

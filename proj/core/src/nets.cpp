#include "uat/nets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uat/error.hpp"

namespace uat {

std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::ReLU:
      return "relu";
    case ActivationKind::Sigma1:
      return "sigma1";
  }
  return "unknown";
}

ActivationKind activation_from_string(std::string_view name) {
  if (name == "relu") return ActivationKind::ReLU;
  if (name == "sigma1") return ActivationKind::Sigma1;
  throw ParseError("unknown activation '" + std::string(name) + "' (expected relu|sigma1)");
}

double eval_hidden_unit(ActivationKind kind, double t) {
  if (!std::isfinite(t)) throw DomainError("eval_hidden_unit: non-finite pre-activation");
  return kind == ActivationKind::ReLU ? relu(t) : sigma1(t);
}

namespace {

void require_finite(const std::vector<double>& values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError(std::string("Net: non-finite entry in ") + what);
  }
}

}  // namespace

Net::Net(std::size_t input_dim, std::size_t hidden_count, std::size_t output_count,
         std::vector<double> hidden_weights, std::vector<double> hidden_biases,
         std::vector<double> output_weights, ActivationKind activation, bool softmax_head)
    : input_dim_(input_dim),
      hidden_count_(hidden_count),
      output_count_(output_count),
      hidden_weights_(std::move(hidden_weights)),
      hidden_biases_(std::move(hidden_biases)),
      output_weights_(std::move(output_weights)),
      activation_(activation),
      softmax_head_(softmax_head) {
  if (input_dim_ == 0 || hidden_count_ == 0 || output_count_ == 0) {
    throw ShapeError("Net: input_dim, hidden_count and output_count must be positive");
  }
  if (hidden_weights_.size() != hidden_count_ * input_dim_) {
    throw ShapeError("Net: hidden_weights must hold hidden_count x input_dim entries");
  }
  if (hidden_biases_.size() != hidden_count_) {
    throw ShapeError("Net: hidden_biases must hold hidden_count entries");
  }
  if (output_weights_.size() != output_count_ * hidden_count_) {
    throw ShapeError("Net: output_weights must hold output_count x hidden_count entries");
  }
  if (softmax_head_ && output_count_ < 2) {
    throw InvalidInputError("Net: a softmax head needs at least two outputs");
  }
  require_finite(hidden_weights_, "hidden_weights");
  require_finite(hidden_biases_, "hidden_biases");
  require_finite(output_weights_, "output_weights");
}

Net Net::with_softmax_head(bool on) const {
  return Net(input_dim_, hidden_count_, output_count_, hidden_weights_, hidden_biases_,
             output_weights_, activation_, on);
}

Net Net::with_output_weights(std::size_t output_count,
                             std::vector<double> output_weights) const {
  return Net(input_dim_, hidden_count_, output_count, hidden_weights_, hidden_biases_,
             std::move(output_weights), activation_, softmax_head_);
}

std::vector<double> hidden_activations(const Net& net, std::span<const double> x) {
  if (x.size() != net.input_dim()) {
    throw ShapeError("eval_net: input has length " + std::to_string(x.size()) +
                     ", net expects " + std::to_string(net.input_dim()));
  }
  const std::size_t n = net.hidden_count();
  const std::size_t d = net.input_dim();
  const double* w = net.hidden_weights().data();
  std::vector<double> h(n);
  for (std::size_t j = 0; j < n; ++j) {
    double t = net.hidden_bias(j);
    for (std::size_t k = 0; k < d; ++k) t += w[j * d + k] * x[k];
    h[j] = net.activation() == ActivationKind::ReLU ? relu(t) : sigma1(t);
  }
  return h;
}

std::vector<double> eval_logits(const Net& net, std::span<const double> x) {
  const std::vector<double> h = hidden_activations(net, x);
  const std::size_t n = net.hidden_count();
  std::vector<double> g(net.output_count(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double* a = net.output_weights().data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += a[j] * h[j];
    g[i] = acc;
  }
  return g;
}

std::vector<double> eval_net(const Net& net, std::span<const double> x) {
  std::vector<double> g = eval_logits(net, x);
  if (net.softmax_head()) return softmax(g);
  return g;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw DomainError("softmax: empty logit vector");
  double top = logits[0];
  for (double v : logits) {
    if (!std::isfinite(v)) throw DomainError("softmax: non-finite logit");
    top = std::max(top, v);
  }
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace uat

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace uat {

enum class ActivationKind { ReLU, Sigma1 };

std::string_view to_string(ActivationKind kind);
ActivationKind activation_from_string(std::string_view name);

/// max(0, t).
inline double relu(double t) { return t > 0.0 ? t : 0.0; }

/// Clipped unit ramp: 0 for t <= -0.5, t + 0.5 in between, 1 for t >= 0.5.
/// Equal to relu(t + 0.5) - relu(t - 0.5).
inline double sigma1(double t) {
  if (t <= -0.5) return 0.0;
  if (t >= 0.5) return 1.0;
  return t + 0.5;
}

/// Checked activation; throws DomainError on non-finite t.
double eval_hidden_unit(ActivationKind kind, double t);

/// Single-hidden-layer network
///
///   g_i(x) = sum_j A(i, j) * act(W(j, :) . x + b(j)),   i = 0..m-1
///
/// optionally followed by a softmax over the m outputs. There is no output
/// bias; constant offsets are carried by saturated hidden units. Values are
/// immutable after construction. Weights are stored row-major: W is n x d,
/// A is m x n.
class Net {
 public:
  Net(std::size_t input_dim, std::size_t hidden_count, std::size_t output_count,
      std::vector<double> hidden_weights, std::vector<double> hidden_biases,
      std::vector<double> output_weights, ActivationKind activation,
      bool softmax_head = false);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t hidden_count() const noexcept { return hidden_count_; }
  std::size_t output_count() const noexcept { return output_count_; }
  ActivationKind activation() const noexcept { return activation_; }
  bool softmax_head() const noexcept { return softmax_head_; }

  std::span<const double> hidden_row(std::size_t j) const {
    return {hidden_weights_.data() + j * input_dim_, input_dim_};
  }
  double hidden_weight(std::size_t j, std::size_t k) const {
    return hidden_weights_[j * input_dim_ + k];
  }
  double hidden_bias(std::size_t j) const { return hidden_biases_[j]; }
  std::span<const double> output_row(std::size_t i) const {
    return {output_weights_.data() + i * hidden_count_, hidden_count_};
  }
  double output_weight(std::size_t i, std::size_t j) const {
    return output_weights_[i * hidden_count_ + j];
  }

  const std::vector<double>& hidden_weights() const noexcept { return hidden_weights_; }
  const std::vector<double>& hidden_biases() const noexcept { return hidden_biases_; }
  const std::vector<double>& output_weights() const noexcept { return output_weights_; }

  /// Same network with the softmax head switched on or off.
  Net with_softmax_head(bool on) const;
  /// Same hidden layer with a replaced m' x n output matrix.
  Net with_output_weights(std::size_t output_count, std::vector<double> output_weights) const;

  /// Structural equality: identical shapes, ordering and bit-identical weights.
  friend bool operator==(const Net&, const Net&) = default;

 private:
  std::size_t input_dim_;
  std::size_t hidden_count_;
  std::size_t output_count_;
  std::vector<double> hidden_weights_;
  std::vector<double> hidden_biases_;
  std::vector<double> output_weights_;
  ActivationKind activation_;
  bool softmax_head_;
};

/// Hidden-layer activations act(W x + b), length n.
std::vector<double> hidden_activations(const Net& net, std::span<const double> x);

/// Pre-softmax outputs regardless of the head flag.
std::vector<double> eval_logits(const Net& net, std::span<const double> x);

/// Network output: logits, or their softmax when the head is on.
std::vector<double> eval_net(const Net& net, std::span<const double> x);

/// Numerically stable softmax (max-shifted). Throws DomainError on empty or
/// non-finite input.
std::vector<double> softmax(std::span<const double> logits);

}  // namespace uat

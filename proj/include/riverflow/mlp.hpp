#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace riverflow {

/// Dense row-major matrix. Sized for networks with a few dozen parameters.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  bool same_shape(const Matrix& other) const {
    return rows == other.rows && cols == other.cols;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

enum class Activation { Tanh };

/// Fully connected feed-forward network. Transition k maps layer k to layer
/// k+1 through weights[k] (layer_sizes[k+1] x layer_sizes[k]) and biases[k].
/// Every non-input layer applies the activation.
struct Network {
  std::vector<std::size_t> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  Activation activation = Activation::Tanh;

  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  std::size_t parameter_count() const;

  friend bool operator==(const Network&, const Network&) = default;
};

/// Gradients (or velocities) shaped exactly like a Network's parameters.
struct GradientSet {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  static GradientSet zeros_like(const Network& net);
  bool congruent_with(const Network& net) const;

  friend bool operator==(const GradientSet&, const GradientSet&) = default;
};

struct TrainingHyperparams {
  double learning_rate = 0.05;
  double momentum_coefficient = 0.9;
  std::size_t max_epochs = 100000;
  /// Early stop once the normalized training MSE reaches this value.
  double target_mse = 2.72e-4;
  std::uint64_t seed = 42;

  /// Throws DomainError when a field is out of range.
  void validate() const;

  friend bool operator==(const TrainingHyperparams&, const TrainingHyperparams&) = default;
};

double tanh_activation(double x);

/// Weights uniform in [-0.5, 0.5] from a seeded 64-bit Mersenne Twister,
/// biases zero. The bit-to-double mapping is done here rather than through
/// std::uniform_real_distribution so results do not depend on the standard
/// library vendor.
Network init_network(std::span<const std::size_t> layer_sizes, std::uint64_t seed);

/// Throws DomainError if the layer sizes or parameter shapes are inconsistent
/// or any parameter is non-finite.
void validate_network(const Network& net);

std::vector<double> forward(const Network& net, std::span<const double> input);

/// E = (1/N) * sum_n sum_j (forward(x_n)_j - t_nj)^2
double batch_loss(const Network& net,
                  std::span<const std::vector<double>> inputs,
                  std::span<const std::vector<double>> targets);

/// Analytic gradient of batch_loss with respect to every weight and bias.
GradientSet batch_gradients(const Network& net,
                            std::span<const std::vector<double>> inputs,
                            std::span<const std::vector<double>> targets);

struct MomentumStepResult {
  Network network;
  GradientSet velocity;
};

/// Heavy-ball update: v' = mu * v - lr * g, theta' = theta + v'.
MomentumStepResult momentum_step(const Network& net, const GradientSet& grads,
                                 const GradientSet& velocity,
                                 const TrainingHyperparams& hp);

}  // namespace riverflow

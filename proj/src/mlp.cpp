#include "riverflow/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "riverflow/errors.hpp"

namespace riverflow {

namespace {

void check_batch(const Network& net, std::span<const std::vector<double>> inputs,
                 std::span<const std::vector<double>> targets) {
  if (inputs.empty()) throw DomainError("empty batch");
  if (inputs.size() != targets.size()) {
    throw DomainError("batch has " + std::to_string(inputs.size()) + " inputs but " +
                      std::to_string(targets.size()) + " targets");
  }
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    if (inputs[n].size() != net.input_size() || targets[n].size() != net.output_size()) {
      throw DomainError("batch sample " + std::to_string(n) +
                        " does not match the network dimensions");
    }
  }
}

// Fills activations[k] with the output of layer k (activations[0] is the input).
void forward_into(const Network& net, std::span<const double> input,
                  std::vector<std::vector<double>>& activations) {
  activations.resize(net.layer_sizes.size());
  activations[0].assign(input.begin(), input.end());
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    const Matrix& w = net.weights[k];
    const std::vector<double>& prev = activations[k];
    std::vector<double>& next = activations[k + 1];
    next.resize(w.rows);
    for (std::size_t i = 0; i < w.rows; ++i) {
      double z = net.biases[k][i];
      for (std::size_t j = 0; j < w.cols; ++j) z += w(i, j) * prev[j];
      next[i] = tanh_activation(z);
    }
  }
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) n += weights[k].data.size() + biases[k].size();
  return n;
}

GradientSet GradientSet::zeros_like(const Network& net) {
  GradientSet g;
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    g.weights.emplace_back(net.weights[k].rows, net.weights[k].cols);
    g.biases.emplace_back(net.biases[k].size(), 0.0);
  }
  return g;
}

bool GradientSet::congruent_with(const Network& net) const {
  if (weights.size() != net.weights.size() || biases.size() != net.biases.size()) return false;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!weights[k].same_shape(net.weights[k])) return false;
    if (weights[k].data.size() != weights[k].rows * weights[k].cols) return false;
    if (biases[k].size() != net.biases[k].size()) return false;
  }
  return true;
}

void TrainingHyperparams::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw DomainError("learning rate must be positive");
  }
  if (!(momentum_coefficient >= 0.0 && momentum_coefficient < 1.0)) {
    throw DomainError("momentum coefficient must lie in [0, 1)");
  }
  if (max_epochs < 1) throw DomainError("max epochs must be at least 1");
  if (!(target_mse >= 0.0) || !std::isfinite(target_mse)) {
    throw DomainError("target MSE must be non-negative");
  }
}

// std::tanh rounds to +-1 once |x| exceeds about 19; keep the result strictly inside (-1, 1).
double tanh_activation(double x) {
  constexpr double kBound = 1.0 - 0x1.0p-53;
  return std::clamp(std::tanh(x), -kBound, kBound);
}

Network init_network(std::span<const std::size_t> layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw DomainError("a network needs at least two layers");
  for (std::size_t n : layer_sizes) {
    if (n == 0) throw DomainError("layer sizes must be positive");
  }

  std::mt19937_64 gen(seed);
  Network net;
  net.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
  for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
    Matrix w(layer_sizes[k + 1], layer_sizes[k]);
    for (double& x : w.data) {
      // 53 random bits -> [0, 1) -> [-0.5, 0.5)
      const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      x = u - 0.5;
    }
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(layer_sizes[k + 1], 0.0);
  }
  return net;
}

void validate_network(const Network& net) {
  if (net.layer_sizes.size() < 2) throw DomainError("a network needs at least two layers");
  const std::size_t transitions = net.layer_sizes.size() - 1;
  if (net.weights.size() != transitions || net.biases.size() != transitions) {
    throw DomainError("weight/bias count does not match the layer count");
  }
  for (std::size_t k = 0; k < transitions; ++k) {
    const Matrix& w = net.weights[k];
    if (net.layer_sizes[k] == 0 || net.layer_sizes[k + 1] == 0) {
      throw DomainError("layer sizes must be positive");
    }
    if (w.rows != net.layer_sizes[k + 1] || w.cols != net.layer_sizes[k] ||
        w.data.size() != w.rows * w.cols) {
      throw DomainError("weight matrix " + std::to_string(k) + " has the wrong shape");
    }
    if (net.biases[k].size() != net.layer_sizes[k + 1]) {
      throw DomainError("bias vector " + std::to_string(k) + " has the wrong length");
    }
    if (!all_finite(w.data) || !all_finite(net.biases[k])) {
      throw DomainError("network parameters must be finite");
    }
  }
}

std::vector<double> forward(const Network& net, std::span<const double> input) {
  if (input.size() != net.input_size()) {
    throw DomainError("input has " + std::to_string(input.size()) + " values, network expects " +
                      std::to_string(net.input_size()));
  }
  std::vector<std::vector<double>> activations;
  forward_into(net, input, activations);
  return std::move(activations.back());
}

double batch_loss(const Network& net, std::span<const std::vector<double>> inputs,
                  std::span<const std::vector<double>> targets) {
  check_batch(net, inputs, targets);
  std::vector<std::vector<double>> activations;
  double sum = 0.0;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    forward_into(net, inputs[n], activations);
    const std::vector<double>& out = activations.back();
    for (std::size_t j = 0; j < out.size(); ++j) {
      const double d = out[j] - targets[n][j];
      sum += d * d;
    }
  }
  return sum / static_cast<double>(inputs.size());
}

GradientSet batch_gradients(const Network& net, std::span<const std::vector<double>> inputs,
                            std::span<const std::vector<double>> targets) {
  check_batch(net, inputs, targets);
  GradientSet grads = GradientSet::zeros_like(net);
  const double scale = 2.0 / static_cast<double>(inputs.size());
  const std::size_t transitions = net.weights.size();

  std::vector<std::vector<double>> activations;
  std::vector<double> delta;
  std::vector<double> prev_delta;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    forward_into(net, inputs[n], activations);

    // delta holds dE/dz for the layer being processed.
    const std::vector<double>& out = activations.back();
    delta.resize(out.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
      delta[j] = scale * (out[j] - targets[n][j]) * (1.0 - out[j] * out[j]);
    }

    for (std::size_t k = transitions; k-- > 0;) {
      const Matrix& w = net.weights[k];
      const std::vector<double>& a_in = activations[k];
      Matrix& gw = grads.weights[k];
      std::vector<double>& gb = grads.biases[k];
      for (std::size_t i = 0; i < w.rows; ++i) {
        gb[i] += delta[i];
        for (std::size_t j = 0; j < w.cols; ++j) gw(i, j) += delta[i] * a_in[j];
      }
      if (k == 0) break;
      prev_delta.assign(w.cols, 0.0);
      for (std::size_t i = 0; i < w.rows; ++i) {
        for (std::size_t j = 0; j < w.cols; ++j) prev_delta[j] += w(i, j) * delta[i];
      }
      for (std::size_t j = 0; j < w.cols; ++j) prev_delta[j] *= 1.0 - a_in[j] * a_in[j];
      delta.swap(prev_delta);
    }
  }
  return grads;
}

MomentumStepResult momentum_step(const Network& net, const GradientSet& grads,
                                 const GradientSet& velocity, const TrainingHyperparams& hp) {
  hp.validate();
  if (!grads.congruent_with(net) || !velocity.congruent_with(net)) {
    throw DomainError("gradient or velocity shape does not match the network");
  }
  MomentumStepResult result{net, velocity};
  const double mu = hp.momentum_coefficient;
  const double lr = hp.learning_rate;
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    std::vector<double>& v = result.velocity.weights[k].data;
    std::vector<double>& w = result.network.weights[k].data;
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = mu * v[i] - lr * grads.weights[k].data[i];
      w[i] += v[i];
    }
    std::vector<double>& vb = result.velocity.biases[k];
    std::vector<double>& b = result.network.biases[k];
    for (std::size_t i = 0; i < b.size(); ++i) {
      vb[i] = mu * vb[i] - lr * grads.biases[k][i];
      b[i] += vb[i];
    }
  }
  return result;
}

}  // namespace riverflow

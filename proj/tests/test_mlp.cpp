#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "riverflow/errors.hpp"
#include "riverflow/mlp.hpp"

using namespace riverflow;
using riverflow::testing::finite_difference_gradient;
using riverflow::testing::flatten;
using riverflow::testing::gradient_entry_close;
using riverflow::testing::reference_loss;

namespace {

using Batch = std::vector<std::vector<double>>;

Network hand_network() {
  // [2, 2, 1] with fixed parameters.
  Network net;
  net.layer_sizes = {2, 2, 1};
  Matrix w1(2, 2);
  w1(0, 0) = 0.5;
  w1(0, 1) = -0.25;
  w1(1, 0) = 0.1;
  w1(1, 1) = 0.8;
  Matrix w2(1, 2);
  w2(0, 0) = 1.5;
  w2(0, 1) = -0.7;
  net.weights = {w1, w2};
  net.biases = {{0.1, -0.2}, {0.05}};
  return net;
}

Network random_network(std::mt19937_64& gen, std::vector<std::size_t> sizes) {
  Network net = init_network(sizes, gen());
  std::uniform_real_distribution<double> bias(-0.3, 0.3);
  for (auto& b : net.biases) {
    for (double& x : b) x = bias(gen);
  }
  return net;
}

Batch random_batch(std::mt19937_64& gen, std::size_t n, std::size_t width, double lo = -1.0,
                   double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Batch b(n, std::vector<double>(width));
  for (auto& row : b) {
    for (double& x : row) x = u(gen);
  }
  return b;
}

}  // namespace

TEST_CASE("tanh activation") {
  CHECK(tanh_activation(0.0) == 0.0);
  // (e^2 - 1) / (e^2 + 1) evaluated at 30 digits.
  CHECK(tanh_activation(1.0) == doctest::Approx(0.761594155955764888).epsilon(1e-15));
  CHECK(tanh_activation(-0.37) == -tanh_activation(0.37));
  for (double x : {-20.0, -3.0, 0.5, 3.0}) {
    CHECK(std::abs(tanh_activation(x)) < 1.0);
  }
}

TEST_CASE("init_network") {
  const std::array<std::size_t, 3> sizes{3, 7, 1};

  SUBCASE("deterministic per seed") {
    CHECK(init_network(sizes, 42) == init_network(sizes, 42));
    CHECK_FALSE(init_network(sizes, 42) == init_network(sizes, 43));
  }

  SUBCASE("shapes and ranges") {
    const Network net = init_network(sizes, 7);
    REQUIRE(net.weights.size() == 2);
    CHECK(net.weights[0].rows == 7);
    CHECK(net.weights[0].cols == 3);
    CHECK(net.weights[1].rows == 1);
    CHECK(net.weights[1].cols == 7);
    CHECK(net.parameter_count() == 36);
    for (const auto& w : net.weights) {
      for (double x : w.data) {
        CHECK(x >= -0.5);
        CHECK(x <= 0.5);
      }
    }
    for (const auto& b : net.biases) {
      for (double x : b) CHECK(x == 0.0);
    }
    CHECK_NOTHROW(validate_network(net));
  }

  SUBCASE("rejects bad layer sizes") {
    const std::array<std::size_t, 1> one{2};
    CHECK_THROWS_AS(init_network(one, 1), DomainError);
    const std::array<std::size_t, 3> zero{3, 0, 1};
    CHECK_THROWS_AS(init_network(zero, 1), DomainError);
  }
}

TEST_CASE("forward") {
  SUBCASE("zero parameters give zero output") {
    const std::array<std::size_t, 3> sizes{3, 7, 1};
    Network net = init_network(sizes, 1);
    for (auto& w : net.weights) std::fill(w.data.begin(), w.data.end(), 0.0);
    const std::array<double, 3> x{0.3, -2.0, 7.0};
    CHECK(forward(net, x) == std::vector<double>{0.0});
  }

  SUBCASE("single transition") {
    Network net;
    net.layer_sizes = {1, 1};
    net.weights = {Matrix(1, 1, 0.8)};
    net.biases = {{-0.3}};
    const std::array<double, 1> x{0.6};
    CHECK(forward(net, x)[0] == doctest::Approx(std::tanh(0.8 * 0.6 - 0.3)).epsilon(1e-15));
  }

  SUBCASE("hand-computed two-layer composition") {
    const std::array<double, 2> x{0.5, -0.5};
    // mpmath, 30 digits: tanh(1.5 tanh(0.475) - 0.7 tanh(-0.55) + 0.05)
    CHECK(forward(hand_network(), x)[0] ==
          doctest::Approx(0.787079541525858177).epsilon(1e-14));
  }

  SUBCASE("dimension mismatch") {
    const std::array<double, 3> x{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(forward(hand_network(), x), DomainError);
  }

  SUBCASE("pure and bounded") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 50; ++trial) {
      const Network net = random_network(gen, {3, 5, 1});
      const auto x = random_batch(gen, 1, 3, -5.0, 5.0).front();
      const auto a = forward(net, x);
      CHECK(a == forward(net, x));
      CHECK(a[0] > -1.0);
      CHECK(a[0] < 1.0);
    }
  }
}

TEST_CASE("batch_gradients") {
  std::mt19937_64 gen(11);

  SUBCASE("zero at the minimum") {
    const Network net = random_network(gen, {3, 4, 1});
    const Batch xs = random_batch(gen, 5, 3);
    Batch ts;
    for (const auto& x : xs) ts.push_back(forward(net, x));
    for (double g : flatten(batch_gradients(net, xs, ts))) CHECK(g == 0.0);
  }

  SUBCASE("matches central finite differences") {
    // Networks with at most 20 parameters, batches of at most 8 samples.
    const std::vector<std::vector<std::size_t>> shapes{{3, 2, 1}, {3, 3, 1}, {2, 3, 2}, {1, 4, 1}};
    for (int trial = 0; trial < 40; ++trial) {
      const auto& shape = shapes[trial % shapes.size()];
      const Network net = random_network(gen, shape);
      REQUIRE(net.parameter_count() <= 20);
      const std::size_t n = 1 + trial % 8;
      const Batch xs = random_batch(gen, n, shape.front());
      const Batch ts = random_batch(gen, n, shape.back(), -0.9, 0.9);
      const auto analytic = flatten(batch_gradients(net, xs, ts));
      const auto numeric = finite_difference_gradient(net, xs, ts, 1e-6);
      REQUIRE(analytic.size() == numeric.size());
      for (std::size_t i = 0; i < analytic.size(); ++i) {
        INFO("trial " << trial << " parameter " << i);
        CHECK(gradient_entry_close(analytic[i], numeric[i]));
      }
    }
  }

  SUBCASE("duplicating the batch leaves gradients unchanged") {
    const Network net = random_network(gen, {3, 4, 1});
    const Batch xs = random_batch(gen, 4, 3);
    const Batch ts = random_batch(gen, 4, 1, -0.9, 0.9);
    Batch xs2 = xs, ts2 = ts;
    xs2.insert(xs2.end(), xs.begin(), xs.end());
    ts2.insert(ts2.end(), ts.begin(), ts.end());
    const auto a = flatten(batch_gradients(net, xs, ts));
    const auto b = flatten(batch_gradients(net, xs2, ts2));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-12));
  }

  SUBCASE("errors") {
    const Network net = random_network(gen, {3, 2, 1});
    CHECK_THROWS_AS(batch_gradients(net, Batch{}, Batch{}), DomainError);
    CHECK_THROWS_AS(batch_gradients(net, random_batch(gen, 2, 3), random_batch(gen, 3, 1)),
                    DomainError);
    CHECK_THROWS_AS(batch_gradients(net, random_batch(gen, 2, 2), random_batch(gen, 2, 1)),
                    DomainError);
  }

  SUBCASE("loss agrees with the reference") {
    const Network net = random_network(gen, {3, 5, 1});
    const Batch xs = random_batch(gen, 6, 3);
    const Batch ts = random_batch(gen, 6, 1);
    CHECK(batch_loss(net, xs, ts) == doctest::Approx(reference_loss(net, xs, ts)).epsilon(1e-14));
  }
}

TEST_CASE("momentum_step") {
  const Network net = hand_network();
  GradientSet g = GradientSet::zeros_like(net);
  for (auto& w : g.weights) std::fill(w.data.begin(), w.data.end(), 0.2);
  for (auto& b : g.biases) std::fill(b.begin(), b.end(), -0.4);
  const GradientSet zero = GradientSet::zeros_like(net);

  SUBCASE("no momentum is plain gradient descent") {
    TrainingHyperparams hp;
    hp.learning_rate = 0.1;
    hp.momentum_coefficient = 0.0;
    const auto step = momentum_step(net, g, zero, hp);
    CHECK(step.network.weights[0](0, 0) == doctest::Approx(0.5 - 0.1 * 0.2));
    CHECK(step.network.biases[1][0] == doctest::Approx(0.05 + 0.1 * 0.4));
  }

  SUBCASE("zero gradient and velocity is a fixed point") {
    const auto step = momentum_step(net, zero, zero, TrainingHyperparams{});
    CHECK(step.network == net);
    CHECK(step.velocity == zero);
  }

  SUBCASE("second displacement with constant gradient") {
    TrainingHyperparams hp;
    hp.learning_rate = 0.1;
    hp.momentum_coefficient = 0.9;
    const auto first = momentum_step(net, g, zero, hp);
    const auto second = momentum_step(first.network, g, first.velocity, hp);
    const double d = second.network.weights[0](1, 1) - first.network.weights[0](1, 1);
    CHECK(d == doctest::Approx(-0.1 * 0.2 * 1.9).epsilon(1e-12));
  }

  SUBCASE("shape mismatch") {
    GradientSet bad = zero;
    bad.biases[0].push_back(0.0);
    CHECK_THROWS_AS(momentum_step(net, bad, zero, TrainingHyperparams{}), DomainError);
    CHECK_THROWS_AS(momentum_step(net, zero, bad, TrainingHyperparams{}), DomainError);
  }

  SUBCASE("hyperparameter validation") {
    TrainingHyperparams hp;
    hp.momentum_coefficient = 1.0;
    CHECK_THROWS_AS(hp.validate(), DomainError);
    hp = {};
    hp.learning_rate = 0.0;
    CHECK_THROWS_AS(hp.validate(), DomainError);
    hp = {};
    hp.max_epochs = 0;
    CHECK_THROWS_AS(hp.validate(), DomainError);
  }
}

TEST_CASE("small plain steps never increase the loss") {
  std::mt19937_64 gen(2024);
  TrainingHyperparams hp;
  hp.learning_rate = 1e-3;
  hp.momentum_coefficient = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Network net = random_network(gen, {3, static_cast<std::size_t>(1 + trial % 8), 1});
    const Batch xs = random_batch(gen, 8, 3, -0.9, 0.9);
    const Batch ts = random_batch(gen, 8, 1, -0.9, 0.9);
    const double before = batch_loss(net, xs, ts);
    const auto step =
        momentum_step(net, batch_gradients(net, xs, ts), GradientSet::zeros_like(net), hp);
    CHECK(batch_loss(step.network, xs, ts) <= before);
  }
}

TEST_CASE("training loop is reproducible") {
  auto run = [] {
    std::mt19937_64 gen(3);
    const Batch xs = random_batch(gen, 10, 3);
    const Batch ts = random_batch(gen, 10, 1, -0.9, 0.9);
    const std::array<std::size_t, 3> sizes{3, 7, 1};
    Network net = init_network(sizes, 99);
    GradientSet v = GradientSet::zeros_like(net);
    for (int epoch = 0; epoch < 200; ++epoch) {
      auto step = momentum_step(net, batch_gradients(net, xs, ts), v, TrainingHyperparams{});
      net = std::move(step.network);
      v = std::move(step.velocity);
    }
    return net;
  };
  CHECK(run() == run());
}

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "riverflow/errors.hpp"
#include "riverflow/training.hpp"
#include "synthetic.hpp"

using namespace riverflow;
using riverflow::testing::synthetic_features;

namespace {

const std::vector<FeatureRecord>& corpus() {
  static const auto records = synthetic_features(31, 1979);
  return records;
}

const TrainedModel& default_model() {
  static const TrainedModel model = train(corpus(), 7, TrainingHyperparams{});
  return model;
}

TrainingHyperparams quick() {
  TrainingHyperparams hp;
  hp.max_epochs = 400;
  return hp;
}

}  // namespace

TEST_CASE("train on the full-scale synthetic corpus") {
  const TrainedModel& m = default_model();
  CHECK(m.model.network.layer_sizes == std::vector<std::size_t>{3, 7, 1});
  CHECK(m.training_metrics.mse < 1e-3);
  CHECK(m.training_metrics.r > 0.99);
  CHECK(m.epoch_count >= 1);
  CHECK(m.epoch_count <= TrainingHyperparams{}.max_epochs);
  REQUIRE(m.loss_history.size() == m.epoch_count);
  CHECK(m.loss_history.back() == m.training_metrics.mse);

  SUBCASE("loss converges rather than diverges") {
    const double first = m.loss_history.front();
    const double last = m.loss_history.back();
    const double best = *std::min_element(m.loss_history.begin(), m.loss_history.end());
    CHECK(last <= first);
    CHECK(last <= best * 1.1);
  }

  SUBCASE("training MSE matches a recomputation in normalized space") {
    std::vector<double> pred, actual;
    for (const auto& r : corpus()) {
      pred.push_back(m.model.predict_normalized(r.swe_may1, r.precip_mjj, r.temp_mjj_rankine));
      actual.push_back(m.model.scaler.apply_column(kDischarge, *r.discharge_mjj));
    }
    CHECK(std::abs(mse_metric(pred, actual) - m.training_metrics.mse) < 1e-12);
  }

  SUBCASE("predictions on training records are within 5%") {
    for (const auto& r : corpus()) {
      const double q = predict(m, r.swe_may1, r.precip_mjj, r.temp_mjj_rankine);
      CHECK(std::abs(q - *r.discharge_mjj) < 0.05 * *r.discharge_mjj);
    }
  }
}

TEST_CASE("train preconditions") {
  const auto three = synthetic_features(3, 1);
  CHECK_THROWS_WITH_AS(train(three, 7, quick()), doctest::Contains("too few records"),
                       DomainError);

  auto missing = synthetic_features(6, 1);
  missing[2].discharge_mjj.reset();
  CHECK_THROWS_AS(train(missing, 7, quick()), DomainError);

  auto nonfinite = synthetic_features(6, 1);
  nonfinite[0].precip_mjj = std::nan("");
  CHECK_THROWS_AS(train(nonfinite, 7, quick()), DomainError);

  CHECK_THROWS_AS(train(synthetic_features(6, 1), 0, quick()), DomainError);
}

TEST_CASE("train is deterministic") {
  const auto a = train(corpus(), 5, quick());
  const auto b = train(corpus(), 5, quick());
  CHECK(a.loss_history == b.loss_history);
  CHECK(a.model == b.model);
}

TEST_CASE("early stop at the target MSE") {
  TrainingHyperparams hp;
  hp.target_mse = 0.05;
  const auto m = train(corpus(), 4, hp);
  CHECK(m.epoch_count < hp.max_epochs);
  CHECK(m.loss_history.back() <= 0.05);
  for (std::size_t i = 0; i + 1 < m.loss_history.size(); ++i) CHECK(m.loss_history[i] > 0.05);
}

TEST_CASE("predict") {
  const TrainedModel& m = default_model();

  SUBCASE("zero weights predict the discharge midpoint") {
    DischargeModel zero = m.model;
    for (auto& w : zero.network.weights) std::fill(w.data.begin(), w.data.end(), 0.0);
    for (auto& b : zero.network.biases) std::fill(b.begin(), b.end(), 0.0);
    const double mid =
        0.5 * (zero.scaler.column_mins[kDischarge] + zero.scaler.column_maxs[kDischarge]);
    CHECK(zero.predict(1.0, 2.0, 500.0) == doctest::Approx(mid).epsilon(1e-12));
    CHECK(zero.predict(40.0, 0.0, 520.0) == doctest::Approx(mid).epsilon(1e-12));
  }

  SUBCASE("pure") { CHECK(predict(m, 12.0, 8.0, 505.0) == predict(m, 12.0, 8.0, 505.0)); }

  SUBCASE("domain errors") {
    CHECK_THROWS_AS(predict(m, std::nan(""), 8.0, 505.0), DomainError);
    CHECK_THROWS_AS(predict(m, 12.0, 8.0, 0.0), DomainError);
    CHECK_THROWS_AS(predict(m, 12.0, 8.0, -4.0), DomainError);
  }
}

TEST_CASE("sweep") {
  const TrainingHyperparams hp = quick();

  SUBCASE("one row per node count, best is the argmin") {
    const std::vector<std::size_t> nodes{3, 4, 5, 6, 7, 8};
    const auto result = sweep(corpus(), nodes, hp);
    REQUIRE(result.rows.size() == 6);
    for (std::size_t i = 0; i < nodes.size(); ++i) CHECK(result.rows[i].node_count == nodes[i]);
    for (const auto& row : result.rows) {
      CHECK(result.rows[result.best_index].metrics.mse <= row.metrics.mse);
    }
  }

  SUBCASE("single count equals a direct train") {
    const std::vector<std::size_t> nodes{7};
    const auto result = sweep(corpus(), nodes, hp);
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].metrics == train(corpus(), 7, hp).training_metrics);
  }

  SUBCASE("order independence and parallel equals sequential") {
    const std::vector<std::size_t> forward_order{3, 5, 8};
    const std::vector<std::size_t> reversed{8, 5, 3};
    const auto a = sweep(corpus(), forward_order, hp, true);
    const auto b = sweep(corpus(), reversed, hp, false);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.rows[i] == b.rows[2 - i]);
    CHECK(a.rows == sweep(corpus(), forward_order, hp, false).rows);
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(sweep(corpus(), std::vector<std::size_t>{}, hp), DomainError);
    CHECK_THROWS_AS(sweep(synthetic_features(2, 3), std::vector<std::size_t>{3}, hp),
                    DomainError);
  }
}

TEST_CASE("leave-one-out cross-validation") {
  TrainingHyperparams hp;
  hp.max_epochs = 2000;
  const auto records = synthetic_features(12, 5);
  const Metrics m = leave_one_out(records, 4, hp);
  CHECK(m.mse >= 0.0);
  CHECK(m.r <= 1.0);
  CHECK(m.r > 0.8);
  CHECK(m.pct_error >= 0.0);
  CHECK_THROWS_AS(leave_one_out(synthetic_features(4, 5), 4, hp), DomainError);
}

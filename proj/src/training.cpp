#include "riverflow/training.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <string>

#include "riverflow/errors.hpp"

namespace riverflow {

namespace {

void check_training_set(std::span<const FeatureRecord> features, std::size_t hidden_nodes) {
  if (features.size() < kMinTrainingRecords) {
    throw DomainError("too few records: " + std::to_string(features.size()) + " given, at least " +
                      std::to_string(kMinTrainingRecords) + " required");
  }
  if (hidden_nodes < 1) throw DomainError("hidden node count must be at least 1");
  for (const auto& r : features) {
    if (!r.discharge_mjj) {
      throw DomainError("record for year " + std::to_string(r.year) + " has no discharge");
    }
    if (!std::isfinite(r.swe_may1) || !std::isfinite(r.precip_mjj) ||
        !std::isfinite(r.temp_mjj_rankine) || !std::isfinite(*r.discharge_mjj)) {
      throw DomainError("record for year " + std::to_string(r.year) + " has non-finite values");
    }
  }
}

std::vector<std::vector<double>> feature_rows(std::span<const FeatureRecord> features) {
  std::vector<std::vector<double>> rows;
  rows.reserve(features.size());
  for (const auto& r : features) {
    rows.push_back({r.swe_may1, r.precip_mjj, r.temp_mjj_rankine, *r.discharge_mjj});
  }
  return rows;
}

}  // namespace

double DischargeModel::predict_normalized(double swe, double precip, double temp_rankine) const {
  if (!std::isfinite(swe) || !std::isfinite(precip) || !std::isfinite(temp_rankine)) {
    throw DomainError("prediction inputs must be finite");
  }
  if (!(temp_rankine > 0.0)) throw DomainError("absolute temperature must be positive");
  const std::array<double, kInputCount> x{scaler.apply_column(kSwe, swe),
                                          scaler.apply_column(kPrecip, precip),
                                          scaler.apply_column(kTemp, temp_rankine)};
  return forward(network, x).front();
}

double DischargeModel::predict(double swe, double precip, double temp_rankine) const {
  return scaler.invert_column(kDischarge, predict_normalized(swe, precip, temp_rankine));
}

void validate_model(const DischargeModel& model) {
  validate_network(model.network);
  validate_scaler(model.scaler);
  if (model.network.input_size() != kInputCount || model.network.output_size() != 1) {
    throw DomainError("discharge model network must have 3 inputs and 1 output");
  }
  if (model.scaler.width() != kInputCount + 1) {
    throw DomainError("discharge model scaler must cover 4 columns");
  }
}

Metrics evaluate(const DischargeModel& model, std::span<const FeatureRecord> features) {
  std::vector<double> pred_norm, actual_norm, pred, actual;
  for (const auto& r : features) {
    if (!r.discharge_mjj) {
      throw DomainError("record for year " + std::to_string(r.year) + " has no discharge");
    }
    const double y = model.predict_normalized(r.swe_may1, r.precip_mjj, r.temp_mjj_rankine);
    pred_norm.push_back(y);
    actual_norm.push_back(model.scaler.apply_column(kDischarge, *r.discharge_mjj));
    pred.push_back(model.scaler.invert_column(kDischarge, y));
    actual.push_back(*r.discharge_mjj);
  }
  return {mse_metric(pred_norm, actual_norm), pearson_r(pred, actual),
          percent_error(pred, actual)};
}

TrainedModel train(std::span<const FeatureRecord> features, std::size_t hidden_nodes,
                   const TrainingHyperparams& hp) {
  check_training_set(features, hidden_nodes);
  hp.validate();

  TrainedModel out;
  out.hyperparams = hp;
  const auto rows = feature_rows(features);
  out.model.scaler = fit_scaler(rows);
  const Scaler& s = out.model.scaler;

  std::vector<std::vector<double>> inputs, targets;
  for (const auto& row : rows) {
    inputs.push_back({s.apply_column(kSwe, row[kSwe]), s.apply_column(kPrecip, row[kPrecip]),
                      s.apply_column(kTemp, row[kTemp])});
    targets.push_back({s.apply_column(kDischarge, row[kDischarge])});
  }

  const std::array<std::size_t, 3> sizes{kInputCount, hidden_nodes, 1};
  Network net = init_network(sizes, hp.seed);
  GradientSet velocity = GradientSet::zeros_like(net);
  out.loss_history.reserve(std::min<std::size_t>(hp.max_epochs, 1u << 20));
  for (std::size_t epoch = 0; epoch < hp.max_epochs; ++epoch) {
    const GradientSet grads = batch_gradients(net, inputs, targets);
    auto step = momentum_step(net, grads, velocity, hp);
    net = std::move(step.network);
    velocity = std::move(step.velocity);
    const double loss = batch_loss(net, inputs, targets);
    if (!std::isfinite(loss)) throw DomainError("training diverged: loss is not finite");
    out.loss_history.push_back(loss);
    if (loss <= hp.target_mse) break;
  }
  out.epoch_count = out.loss_history.size();
  out.model.network = std::move(net);
  out.training_metrics = evaluate(out.model, features);
  return out;
}

Metrics leave_one_out(std::span<const FeatureRecord> features, std::size_t hidden_nodes,
                      const TrainingHyperparams& hp) {
  check_training_set(features, hidden_nodes);
  if (features.size() < kMinTrainingRecords + 1) {
    throw DomainError("too few records for leave-one-out: each fold needs " +
                      std::to_string(kMinTrainingRecords) + " training records");
  }
  const Scaler full = fit_scaler(feature_rows(features));
  std::vector<double> pred_norm, actual_norm, pred, actual;
  std::vector<FeatureRecord> fold;
  for (std::size_t i = 0; i < features.size(); ++i) {
    fold.clear();
    for (std::size_t j = 0; j < features.size(); ++j) {
      if (j != i) fold.push_back(features[j]);
    }
    const TrainedModel m = train(fold, hidden_nodes, hp);
    const FeatureRecord& held = features[i];
    const double q = m.model.predict(held.swe_may1, held.precip_mjj, held.temp_mjj_rankine);
    pred.push_back(q);
    actual.push_back(*held.discharge_mjj);
    pred_norm.push_back(full.apply_column(kDischarge, q));
    actual_norm.push_back(full.apply_column(kDischarge, *held.discharge_mjj));
  }
  return {mse_metric(pred_norm, actual_norm), pearson_r(pred, actual),
          percent_error(pred, actual)};
}

SweepResult sweep(std::span<const FeatureRecord> features, std::span<const std::size_t> node_counts,
                  const TrainingHyperparams& hp, bool parallel) {
  if (node_counts.empty()) throw DomainError("sweep needs at least one node count");
  check_training_set(features, 1);
  for (std::size_t n : node_counts) {
    if (n < 1) throw DomainError("hidden node count must be at least 1");
  }

  auto run = [&](std::size_t nodes) {
    return SweepRow{nodes, train(features, nodes, hp).training_metrics};
  };

  SweepResult result;
  if (parallel && node_counts.size() > 1) {
    std::vector<std::future<SweepRow>> pending;
    for (std::size_t n : node_counts) pending.push_back(std::async(std::launch::async, run, n));
    for (auto& f : pending) result.rows.push_back(f.get());
  } else {
    for (std::size_t n : node_counts) result.rows.push_back(run(n));
  }

  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].metrics.mse < result.rows[result.best_index].metrics.mse) {
      result.best_index = i;
    }
  }
  return result;
}

}  // namespace riverflow

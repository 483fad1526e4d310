#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "riverflow/ingest.hpp"
#include "riverflow/metrics.hpp"
#include "riverflow/mlp.hpp"
#include "riverflow/scaling.hpp"

namespace riverflow {

/// Column order of the scaler and of the network inputs.
enum FeatureColumn : std::size_t { kSwe = 0, kPrecip = 1, kTemp = 2, kDischarge = 3 };
inline constexpr std::size_t kInputCount = 3;
inline constexpr std::size_t kMinTrainingRecords = 4;
inline constexpr std::size_t kDefaultHiddenNodes = 7;

/// A network plus the scaler that maps physical units in and out of it.
struct DischargeModel {
  Network network;
  Scaler scaler;

  /// Discharge in CFS. Throws DomainError on non-finite input or a
  /// non-positive absolute temperature.
  double predict(double swe, double precip, double temp_rankine) const;

  /// Network output for one record, in normalized target units.
  double predict_normalized(double swe, double precip, double temp_rankine) const;

  friend bool operator==(const DischargeModel&, const DischargeModel&) = default;
};

/// Throws DomainError unless the network is [3, ..., 1] and the scaler has
/// the four feature-table columns.
void validate_model(const DischargeModel& model);

struct TrainedModel {
  DischargeModel model;
  TrainingHyperparams hyperparams;
  Metrics training_metrics;
  std::size_t epoch_count = 0;
  /// Normalized training MSE after each epoch's update.
  std::vector<double> loss_history;
};

inline double predict(const TrainedModel& m, double swe, double precip, double temp_rankine) {
  return m.model.predict(swe, precip, temp_rankine);
}

/// Fits the scaler on all four columns, initializes [3, hidden_nodes, 1] and
/// runs full-batch momentum epochs until max_epochs or the target MSE.
/// Metrics are evaluated on the training records.
TrainedModel train(std::span<const FeatureRecord> features, std::size_t hidden_nodes,
                   const TrainingHyperparams& hp);

/// Training-set metrics of an existing model: MSE in the scaler's normalized
/// space, r and percent error in CFS.
Metrics evaluate(const DischargeModel& model, std::span<const FeatureRecord> features);

/// Leave-one-out cross-validation. Every fold fits its own scaler and network;
/// the held-out predictions are scored like `evaluate`, with the MSE measured
/// through a scaler fitted on the full table.
Metrics leave_one_out(std::span<const FeatureRecord> features, std::size_t hidden_nodes,
                      const TrainingHyperparams& hp);

struct SweepRow {
  std::size_t node_count = 0;
  Metrics metrics;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< in the order of the requested node counts
  std::size_t best_index = 0;  ///< row with the smallest MSE (first on ties)
};

/// Trains one network per node count with identical hyperparameters. When
/// `parallel` is set the runs execute concurrently; results are identical to
/// a sequential run.
SweepResult sweep(std::span<const FeatureRecord> features, std::span<const std::size_t> node_counts,
                  const TrainingHyperparams& hp, bool parallel = true);

}  // namespace riverflow

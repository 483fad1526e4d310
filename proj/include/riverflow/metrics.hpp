#pragma once

#include <span>

namespace riverflow {

/// The three fit-quality numbers reported per trained network.
struct Metrics {
  double mse = 0.0;        ///< normalized-space mean squared error
  double r = 0.0;          ///< Pearson correlation, physical units
  double pct_error = 0.0;  ///< mean absolute percentage error, physical units

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

double mse_metric(std::span<const double> pred, std::span<const double> actual);

/// Sample Pearson correlation. Throws DomainError for fewer than two points or
/// zero variance in either series.
double pearson_r(std::span<const double> pred, std::span<const double> actual);

/// (100/N) * sum |pred - actual| / |actual|. Throws DomainError on a zero actual.
double percent_error(std::span<const double> pred, std::span<const double> actual);

}  // namespace riverflow

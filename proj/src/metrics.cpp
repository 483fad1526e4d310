#include "riverflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "riverflow/errors.hpp"

namespace riverflow {

namespace {

void check_lengths(std::span<const double> pred, std::span<const double> actual,
                   std::size_t min_len) {
  if (pred.size() != actual.size()) {
    throw DomainError("prediction and actual series differ in length (" +
                      std::to_string(pred.size()) + " vs " + std::to_string(actual.size()) + ")");
  }
  if (pred.size() < min_len) {
    throw DomainError("need at least " + std::to_string(min_len) + " values");
  }
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double mse_metric(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred, actual, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - actual[i];
    s += d * d;
  }
  return s / static_cast<double>(pred.size());
}

double pearson_r(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred, actual, 2);
  const double mp = mean(pred);
  const double ma = mean(actual);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double dx = pred[i] - mp;
    const double dy = actual[i] - ma;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DomainError("correlation undefined for a constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double percent_error(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred, actual, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (actual[i] == 0.0) throw DomainError("percent error undefined for a zero actual value");
    s += std::abs(pred[i] - actual[i]) / std::abs(actual[i]);
  }
  return 100.0 * s / static_cast<double>(pred.size());
}

}  // namespace riverflow

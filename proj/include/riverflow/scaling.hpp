#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace riverflow {

/// Per-column affine map from [column_min, column_max] onto
/// [target_low, target_high]. Values outside the fitted range extrapolate
/// linearly; nothing is clamped.
struct Scaler {
  std::vector<double> column_mins;
  std::vector<double> column_maxs;
  double target_low = -0.9;
  double target_high = 0.9;

  std::size_t width() const { return column_mins.size(); }

  double apply_column(std::size_t column, double x) const;
  double invert_column(std::size_t column, double y) const;

  friend bool operator==(const Scaler&, const Scaler&) = default;
};

/// Throws DomainError on empty input, ragged rows, non-finite values, a
/// constant column, or a target range not strictly inside (-1, 1).
Scaler fit_scaler(std::span<const std::vector<double>> rows, double target_low = -0.9,
                  double target_high = 0.9);

/// Checks the Scaler invariants on a deserialized instance.
void validate_scaler(const Scaler& s);

std::vector<double> apply_scaler(const Scaler& s, std::span<const double> row);
std::vector<double> invert_scaler(const Scaler& s, std::span<const double> row);

}  // namespace riverflow

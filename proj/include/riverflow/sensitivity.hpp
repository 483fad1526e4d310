#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "riverflow/training.hpp"

namespace riverflow {

enum class InputKind { Snowpack, Precipitation, Temperature };

std::string_view to_string(InputKind kind);
std::optional<InputKind> parse_input_kind(std::string_view text);

struct BasePoint {
  double swe = 0.0;           ///< inches
  double precip = 0.0;        ///< inches
  double temp_rankine = 0.0;  ///< degrees Rankine
};

/// One-at-a-time scan. Snowpack and precipitation are scaled by multipliers;
/// temperature is shifted by additive offsets in degrees Fahrenheit.
struct ScanSpec {
  InputKind varied = InputKind::Snowpack;
  BasePoint base;
  std::vector<double> multipliers;
  std::vector<double> offsets_f;
};

/// A scanned value above this multiple of the training maximum is flagged.
inline constexpr double kExtrapolationFactor = 1.5;

struct ScanRow {
  double change = 0.0;  ///< the multiplier, or the offset in degrees F
  double discharge = 0.0;
  double ratio = 0.0;       ///< discharge / base discharge
  double pct_change = 0.0;  ///< 100 * (ratio - 1)
  bool extrapolated = false;
};

struct SensitivityTable {
  ScanSpec spec;
  double base_discharge = 0.0;
  std::vector<ScanRow> rows;
};

/// Throws DomainError on an invalid spec (non-positive multipliers, offsets
/// on a multiplier scan, an empty change list) or when the base prediction is
/// not a positive finite discharge.
SensitivityTable run_scan(const DischargeModel& model, const ScanSpec& spec);

struct InfluenceEntry {
  InputKind input = InputKind::Snowpack;
  double abs_pct_change = 0.0;
  /// Another entry has exactly the same influence.
  bool tied = false;
};

/// Raises each input in turn by relative_perturbation times its training
/// range (max - min from the model's scaler), others held at the base point,
/// and ranks the inputs by |percent change| in predicted discharge, largest
/// first. Ties keep the order snowpack, precipitation, temperature.
std::vector<InfluenceEntry> rank_input_influence(const DischargeModel& model,
                                                 const BasePoint& base,
                                                 double relative_perturbation);

}  // namespace riverflow

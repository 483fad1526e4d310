#include "riverflow/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "riverflow/errors.hpp"

namespace riverflow {

namespace {

double base_discharge_or_throw(const DischargeModel& model, const BasePoint& base) {
  if (!std::isfinite(base.swe) || !std::isfinite(base.precip) ||
      !std::isfinite(base.temp_rankine)) {
    throw DomainError("base point must be finite");
  }
  const double q = model.predict(base.swe, base.precip, base.temp_rankine);
  if (!std::isfinite(q) || !(q > 0.0)) {
    throw DomainError("base discharge " + std::to_string(q) +
                      " CFS is not positive; the base point lies outside the model's credible region");
  }
  return q;
}

BasePoint vary(const BasePoint& base, InputKind kind, double change) {
  BasePoint p = base;
  switch (kind) {
    case InputKind::Snowpack: p.swe = base.swe * change; break;
    case InputKind::Precipitation: p.precip = base.precip * change; break;
    // Fahrenheit and Rankine degrees have the same size.
    case InputKind::Temperature: p.temp_rankine = base.temp_rankine + change; break;
  }
  return p;
}

double value_of(const BasePoint& p, InputKind kind) {
  switch (kind) {
    case InputKind::Snowpack: return p.swe;
    case InputKind::Precipitation: return p.precip;
    case InputKind::Temperature: return p.temp_rankine;
  }
  return 0.0;
}

std::size_t column_of(InputKind kind) {
  switch (kind) {
    case InputKind::Snowpack: return kSwe;
    case InputKind::Precipitation: return kPrecip;
    case InputKind::Temperature: return kTemp;
  }
  return kSwe;
}

}  // namespace

std::string_view to_string(InputKind kind) {
  switch (kind) {
    case InputKind::Snowpack: return "snowpack";
    case InputKind::Precipitation: return "precipitation";
    case InputKind::Temperature: return "temperature";
  }
  return "unknown";
}

std::optional<InputKind> parse_input_kind(std::string_view text) {
  for (InputKind k : {InputKind::Snowpack, InputKind::Precipitation, InputKind::Temperature}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

SensitivityTable run_scan(const DischargeModel& model, const ScanSpec& spec) {
  const bool additive = spec.varied == InputKind::Temperature;
  const auto& changes = additive ? spec.offsets_f : spec.multipliers;
  if (additive && !spec.multipliers.empty()) {
    throw DomainError("temperature scans take offsets, not multipliers");
  }
  if (!additive && !spec.offsets_f.empty()) {
    throw DomainError(std::string(to_string(spec.varied)) + " scans take multipliers, not offsets");
  }
  if (changes.empty()) throw DomainError("scan has no multipliers or offsets");
  for (double c : changes) {
    if (!std::isfinite(c)) throw DomainError("scan changes must be finite");
    if (!additive && !(c > 0.0)) throw DomainError("multipliers must be positive");
  }
  if (!(spec.base.temp_rankine > 0.0)) throw DomainError("base temperature must be positive");

  SensitivityTable table;
  table.spec = spec;
  table.base_discharge = base_discharge_or_throw(model, spec.base);

  const double limit = kExtrapolationFactor * model.scaler.column_maxs.at(column_of(spec.varied));
  for (double c : changes) {
    const BasePoint p = vary(spec.base, spec.varied, c);
    ScanRow row;
    row.change = c;
    row.discharge = model.predict(p.swe, p.precip, p.temp_rankine);
    row.ratio = row.discharge / table.base_discharge;
    row.pct_change = 100.0 * (row.ratio - 1.0);
    row.extrapolated = value_of(p, spec.varied) > limit;
    table.rows.push_back(row);
  }
  return table;
}

std::vector<InfluenceEntry> rank_input_influence(const DischargeModel& model,
                                                 const BasePoint& base,
                                                 double relative_perturbation) {
  if (!(relative_perturbation > 0.0 && relative_perturbation <= 0.5)) {
    throw DomainError("relative perturbation must lie in (0, 0.5]");
  }
  if (!(base.temp_rankine > 0.0)) throw DomainError("base temperature must be positive");
  const double q0 = base_discharge_or_throw(model, base);

  std::vector<InfluenceEntry> out;
  for (InputKind k : {InputKind::Snowpack, InputKind::Precipitation, InputKind::Temperature}) {
    const std::size_t c = column_of(k);
    const double step =
        relative_perturbation * (model.scaler.column_maxs.at(c) - model.scaler.column_mins.at(c));
    BasePoint moved = base;
    switch (k) {
      case InputKind::Snowpack: moved.swe += step; break;
      case InputKind::Precipitation: moved.precip += step; break;
      case InputKind::Temperature: moved.temp_rankine += step; break;
    }
    const double q = model.predict(moved.swe, moved.precip, moved.temp_rankine);
    out.push_back({k, std::abs(100.0 * (q / q0 - 1.0)), false});
  }
  std::stable_sort(out.begin(), out.end(), [](const InfluenceEntry& a, const InfluenceEntry& b) {
    return a.abs_pct_change > b.abs_pct_change;
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (i != j && out[i].abs_pct_change == out[j].abs_pct_change) out[i].tied = true;
    }
  }
  return out;
}

}  // namespace riverflow

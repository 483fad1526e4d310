#pragma once

#include <chrono>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace riverflow {

using Date = std::chrono::year_month_day;

/// One day of station climate data.
struct ClimateDaily {
  Date date;
  double swe = 0.0;        ///< snow water equivalent, inches
  double precip = 0.0;     ///< daily accumulation, inches
  double temp_mean = 0.0;  ///< daily mean, degrees Fahrenheit
};

struct DischargeDaily {
  Date date;
  double discharge = 0.0;  ///< daily mean, cubic feet per second
};

/// One seasonal sample: the May 1 snowpack plus May 1 - Jul 31 aggregates.
struct FeatureRecord {
  int year = 0;
  double swe_may1 = 0.0;          ///< inches
  double precip_mjj = 0.0;        ///< inches, cumulative
  double temp_mjj_rankine = 0.0;  ///< degrees Rankine, mean
  std::optional<double> discharge_mjj;  ///< CFS, mean; absent for prediction-only years

  friend bool operator==(const FeatureRecord&, const FeatureRecord&) = default;
};

struct YearExclusion {
  int year = 0;
  std::string reason;
};

struct FeatureTable {
  std::vector<FeatureRecord> records;     ///< sorted by year
  std::vector<YearExclusion> exclusions;  ///< sorted by year
  std::vector<std::string> warnings;
};

/// Fraction of days in the May 1 - Jul 31 window that must be present.
inline constexpr double kMinWindowCoverage = 0.95;
inline constexpr double kRankineOffset = 459.67;

double fahrenheit_to_rankine(double t_f);

/// Parses "YYYY-MM-DD". Throws ParseError (without a line number) on failure.
Date parse_date(std::string_view text);
std::string format_date(const Date& d);

/// Expects the header `date,swe_in,precip_in,temp_f`.
std::vector<ClimateDaily> parse_climate_csv(std::istream& in);
/// Expects the header `date,discharge_cfs`.
std::vector<DischargeDaily> parse_discharge_csv(std::istream& in);

FeatureTable build_feature_table(const std::vector<ClimateDaily>& climate,
                                 const std::vector<DischargeDaily>& discharge);

/// Feature-table CSV: `year,swe_may1_in,precip_mjj_in,temp_mjj_r,discharge_mjj_cfs`.
/// Numbers are written in shortest round-trip form; an absent discharge is an
/// empty field.
void write_feature_csv(std::ostream& out, const std::vector<FeatureRecord>& records);
std::vector<FeatureRecord> read_feature_csv(std::istream& in);

}  // namespace riverflow

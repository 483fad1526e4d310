#include "riverflow/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "riverflow/csv.hpp"
#include "riverflow/errors.hpp"

namespace riverflow {

namespace {

using std::chrono::days;
using std::chrono::sys_days;

constexpr std::string_view kClimateHeader = "date,swe_in,precip_in,temp_f";
constexpr std::string_view kDischargeHeader = "date,discharge_cfs";
constexpr std::string_view kFeatureHeader =
    "year,swe_may1_in,precip_mjj_in,temp_mjj_r,discharge_mjj_cfs";

int parse_int(std::string_view s) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return -1;
  return value;
}

std::string joined(const std::vector<std::string_view>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

// Reads the header line and checks it against the expected column list.
void expect_header(std::istream& in, std::string_view expected) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header, expected '" + std::string(expected) + "'", 1);
  // Tolerate a UTF-8 byte order mark.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const std::string got = joined(csv::split_fields(line));
  if (got != expected) {
    throw ParseError("unexpected header '" + got + "', expected '" + std::string(expected) + "'", 1);
  }
}

// Calls fn(fields, line_number) for every non-blank data row.
template <typename Fn>
void for_each_row(std::istream& in, std::size_t width, Fn&& fn) {
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split_fields(line);
    if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    try {
      fn(fields, line_no);
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(e.what(), line_no);
    }
  }
}

Date may_first(int year) {
  return std::chrono::year{year} / std::chrono::May / 1;
}

Date july_last(int year) {
  return std::chrono::year{year} / std::chrono::July / 31;
}

bool in_window(const Date& d) {
  const int y = static_cast<int>(d.year());
  return sys_days{d} >= sys_days{may_first(y)} && sys_days{d} <= sys_days{july_last(y)};
}

int window_days(int year) {
  return static_cast<int>((sys_days{july_last(year)} - sys_days{may_first(year)}).count()) + 1;
}

int required_days(int year) {
  return static_cast<int>(std::ceil(kMinWindowCoverage * window_days(year) - 1e-9));
}

template <typename Row>
bool by_date(const Row* a, const Row* b) {
  return sys_days{a->date} < sys_days{b->date};
}

// First duplicated date among date-sorted rows, if any.
template <typename Row>
const Row* first_duplicate(const std::vector<const Row*>& sorted) {
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->date == sorted[i - 1]->date) return sorted[i];
  }
  return nullptr;
}

}  // namespace

double fahrenheit_to_rankine(double t_f) { return t_f + kRankineOffset; }

Date parse_date(std::string_view text) {
  const std::string quoted = "date '" + std::string(text) + "'";
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw ParseError("invalid " + quoted + ", expected YYYY-MM-DD");
  }
  const int y = parse_int(text.substr(0, 4));
  const int m = parse_int(text.substr(5, 2));
  const int d = parse_int(text.substr(8, 2));
  if (y < 0 || m < 0 || d < 0) throw ParseError("invalid " + quoted + ", expected YYYY-MM-DD");
  const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) throw ParseError("invalid calendar " + quoted);
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::vector<ClimateDaily> parse_climate_csv(std::istream& in) {
  expect_header(in, kClimateHeader);
  std::vector<ClimateDaily> rows;
  for_each_row(in, 4, [&](const std::vector<std::string_view>& f, std::size_t) {
    ClimateDaily r;
    r.date = parse_date(f[0]);
    r.swe = csv::parse_number(f[1], "swe_in");
    r.precip = csv::parse_number(f[2], "precip_in");
    r.temp_mean = csv::parse_number(f[3], "temp_f");
    if (r.swe < 0.0) throw ParseError("negative swe_in " + std::string(f[1]));
    if (r.precip < 0.0) throw ParseError("negative precip_in " + std::string(f[2]));
    rows.push_back(r);
  });
  return rows;
}

std::vector<DischargeDaily> parse_discharge_csv(std::istream& in) {
  expect_header(in, kDischargeHeader);
  std::vector<DischargeDaily> rows;
  for_each_row(in, 2, [&](const std::vector<std::string_view>& f, std::size_t) {
    DischargeDaily r;
    r.date = parse_date(f[0]);
    r.discharge = csv::parse_number(f[1], "discharge_cfs");
    if (r.discharge < 0.0) throw ParseError("negative discharge_cfs " + std::string(f[1]));
    rows.push_back(r);
  });
  return rows;
}

FeatureTable build_feature_table(const std::vector<ClimateDaily>& climate,
                                 const std::vector<DischargeDaily>& discharge) {
  std::map<int, std::vector<const ClimateDaily*>> climate_by_year;
  for (const auto& r : climate) climate_by_year[static_cast<int>(r.date.year())].push_back(&r);

  std::map<int, std::vector<const DischargeDaily*>> flow_window_by_year;
  std::map<int, bool> flow_years;
  for (const auto& r : discharge) {
    const int y = static_cast<int>(r.date.year());
    flow_years[y] = true;
    if (in_window(r.date)) flow_window_by_year[y].push_back(&r);
  }

  FeatureTable table;
  for (auto& [year, rows] : climate_by_year) {
    std::sort(rows.begin(), rows.end(), by_date<ClimateDaily>);
    auto exclude = [&, y = year](std::string reason) {
      table.exclusions.push_back({y, std::move(reason)});
    };

    if (const auto* dup = first_duplicate(rows)) {
      exclude("duplicate climate rows for " + format_date(dup->date));
      continue;
    }
    const Date may1 = may_first(year);
    const auto may1_it = std::find_if(rows.begin(), rows.end(),
                                      [&](const ClimateDaily* r) { return r->date == may1; });
    if (may1_it == rows.end()) {
      exclude("missing May 1 SWE reading");
      continue;
    }

    const int needed = required_days(year);
    const int total = window_days(year);
    double precip_sum = 0.0;
    double temp_sum = 0.0;
    int covered = 0;
    for (const ClimateDaily* r : rows) {
      if (!in_window(r->date)) continue;
      precip_sum += r->precip;
      temp_sum += r->temp_mean;
      ++covered;
    }
    if (covered < needed) {
      exclude("insufficient May-Jul climate coverage (" + std::to_string(covered) + "/" +
              std::to_string(total) + " days)");
      continue;
    }

    FeatureRecord rec;
    rec.year = year;
    rec.swe_may1 = (*may1_it)->swe;
    rec.precip_mjj = precip_sum;
    rec.temp_mjj_rankine = fahrenheit_to_rankine(temp_sum / covered);

    if (auto it = flow_window_by_year.find(year); it != flow_window_by_year.end()) {
      auto& flow = it->second;
      std::sort(flow.begin(), flow.end(), by_date<DischargeDaily>);
      if (const auto* dup = first_duplicate(flow)) {
        exclude("duplicate discharge rows for " + format_date(dup->date));
        continue;
      }
      const int flow_days = static_cast<int>(flow.size());
      if (flow_days < needed) {
        exclude("insufficient May-Jul discharge coverage (" + std::to_string(flow_days) + "/" +
                std::to_string(total) + " days)");
        continue;
      }
      double flow_sum = 0.0;
      for (const DischargeDaily* r : flow) flow_sum += r->discharge;
      rec.discharge_mjj = flow_sum / flow_days;
    }

    if (!(rec.temp_mjj_rankine > 400.0 && rec.temp_mjj_rankine < 600.0)) {
      table.warnings.push_back(std::to_string(year) + ": mean temperature " +
                               csv::format_number(rec.temp_mjj_rankine) +
                               " R is outside the plausible 400-600 R band");
    }
    table.records.push_back(rec);
  }

  for (const auto& [year, present] : flow_years) {
    if (present && !climate_by_year.contains(year)) {
      table.warnings.push_back(std::to_string(year) + ": discharge data without climate data ignored");
    }
  }
  return table;
}

void write_feature_csv(std::ostream& out, const std::vector<FeatureRecord>& records) {
  out << kFeatureHeader << '\n';
  for (const auto& r : records) {
    out << r.year << ',' << csv::format_number(r.swe_may1) << ','
        << csv::format_number(r.precip_mjj) << ',' << csv::format_number(r.temp_mjj_rankine)
        << ',';
    if (r.discharge_mjj) out << csv::format_number(*r.discharge_mjj);
    out << '\n';
  }
}

std::vector<FeatureRecord> read_feature_csv(std::istream& in) {
  expect_header(in, kFeatureHeader);
  std::vector<FeatureRecord> records;
  for_each_row(in, 5, [&](const std::vector<std::string_view>& f, std::size_t) {
    FeatureRecord r;
    r.year = parse_int(f[0]);
    if (r.year < 0) throw ParseError("invalid year '" + std::string(f[0]) + "'");
    r.swe_may1 = csv::parse_number(f[1], "swe_may1_in");
    r.precip_mjj = csv::parse_number(f[2], "precip_mjj_in");
    r.temp_mjj_rankine = csv::parse_number(f[3], "temp_mjj_r");
    if (!f[4].empty()) r.discharge_mjj = csv::parse_number(f[4], "discharge_mjj_cfs");
    if (r.swe_may1 < 0.0 || r.precip_mjj < 0.0) throw ParseError("negative snowpack or precipitation");
    if (r.temp_mjj_rankine <= 0.0) throw ParseError("temperature must be positive in Rankine");
    if (r.discharge_mjj && *r.discharge_mjj < 0.0) throw ParseError("negative discharge");
    records.push_back(r);
  });
  return records;
}

}  // namespace riverflow

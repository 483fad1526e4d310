#include "riverflow/scaling.hpp"

#include <cmath>
#include <string>

#include "riverflow/errors.hpp"

namespace riverflow {

namespace {

void check_target_range(double low, double high) {
  if (!(low < high) || !(low > -1.0) || !(high < 1.0)) {
    throw DomainError("normalized range must satisfy -1 < low < high < 1");
  }
}

void check_width(const Scaler& s, std::size_t width) {
  if (width != s.width()) {
    throw DomainError("row has " + std::to_string(width) + " columns, scaler expects " +
                      std::to_string(s.width()));
  }
}

}  // namespace

double Scaler::apply_column(std::size_t column, double x) const {
  const double lo = column_mins.at(column);
  const double hi = column_maxs.at(column);
  return target_low + (x - lo) * (target_high - target_low) / (hi - lo);
}

double Scaler::invert_column(std::size_t column, double y) const {
  const double lo = column_mins.at(column);
  const double hi = column_maxs.at(column);
  return lo + (y - target_low) * (hi - lo) / (target_high - target_low);
}

Scaler fit_scaler(std::span<const std::vector<double>> rows, double target_low,
                  double target_high) {
  if (rows.empty()) throw DomainError("cannot fit a scaler on zero rows");
  check_target_range(target_low, target_high);

  const std::size_t width = rows.front().size();
  if (width == 0) throw DomainError("cannot fit a scaler on zero columns");
  Scaler s;
  s.target_low = target_low;
  s.target_high = target_high;
  s.column_mins = rows.front();
  s.column_maxs = rows.front();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw DomainError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                        " columns, expected " + std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      const double x = rows[r][c];
      if (!std::isfinite(x)) throw DomainError("non-finite value in column " + std::to_string(c));
      if (x < s.column_mins[c]) s.column_mins[c] = x;
      if (x > s.column_maxs[c]) s.column_maxs[c] = x;
    }
  }
  for (std::size_t c = 0; c < width; ++c) {
    if (!(s.column_maxs[c] > s.column_mins[c])) {
      throw DomainError("column " + std::to_string(c) + " is constant and cannot be scaled");
    }
  }
  return s;
}

void validate_scaler(const Scaler& s) {
  check_target_range(s.target_low, s.target_high);
  if (s.column_mins.empty() || s.column_mins.size() != s.column_maxs.size()) {
    throw DomainError("scaler min/max vectors are empty or of different lengths");
  }
  for (std::size_t c = 0; c < s.width(); ++c) {
    if (!std::isfinite(s.column_mins[c]) || !std::isfinite(s.column_maxs[c]) ||
        !(s.column_maxs[c] > s.column_mins[c])) {
      throw DomainError("scaler column " + std::to_string(c) + " has an invalid range");
    }
  }
}

std::vector<double> apply_scaler(const Scaler& s, std::span<const double> row) {
  check_width(s, row.size());
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) out[c] = s.apply_column(c, row[c]);
  return out;
}

std::vector<double> invert_scaler(const Scaler& s, std::span<const double> row) {
  check_width(s, row.size());
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) out[c] = s.invert_column(c, row[c]);
  return out;
}

}  // namespace riverflow

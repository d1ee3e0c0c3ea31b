#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace prefband {

/// One per-round metrics row. `covered` always equals
/// (metric_error <= radius); for corollary-1 style rows the tail statistic
/// is stored in both metric_error and cor1_stat so that identity stays
/// exact.
struct ExperimentRecord {
  std::string experiment;
  int trial = 0;
  int round = 0;  // serialized under the header name "t"
  std::string strategy;
  double estimate_error = 0.0;
  double metric_error = 0.0;
  double radius = 0.0;
  bool covered = false;
  double cor1_stat = 0.0;
  std::uint64_t seed = 0;
};

/// 17-significant-digit float formatting used across all text outputs.
std::string format_double(double value);

/// RFC-4180 quoting: fields containing commas, quotes or newlines are
/// quoted, with embedded quotes doubled.
std::string csv_escape(const std::string& field);

/// Writes the fixed-schema CSV: header row of ExperimentRecord field
/// names, `\n` line endings, floats at 17 significant digits.
void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);

}  // namespace prefband

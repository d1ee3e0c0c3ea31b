#include "prefband/records.hpp"

#include <cstdio>
#include <ostream>

namespace prefband {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << "experiment,trial,t,strategy,estimate_error,metric_error,radius,covered,cor1_stat,seed\n";
  for (const ExperimentRecord& r : records) {
    out << csv_escape(r.experiment) << ',' << r.trial << ',' << r.round << ','
        << csv_escape(r.strategy) << ',' << format_double(r.estimate_error) << ','
        << format_double(r.metric_error) << ',' << format_double(r.radius) << ','
        << (r.covered ? 1 : 0) << ',' << format_double(r.cor1_stat) << ',' << r.seed << '\n';
  }
}

}  // namespace prefband

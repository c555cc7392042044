#include "regmetrics/report.h"

#include <cstdio>
#include <ostream>

namespace regmetrics {
namespace {

std::string g6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

}  // namespace

std::string format_report_row(const ExperimentRow& row) {
  std::string line = row.metric;
  line += ',';
  line += sweep_axis_name(row.axis);
  line += ',' + g6(row.sweep_value);
  line += ',' + std::to_string(row.trials);
  line += ',' + g6(row.accuracy);
  line += ',' + g6(row.mean_rmse_pr);
  line += ',' + g6(row.mean_eval_time_s);
  line += ',' + g6(row.index_build_time_s);
  return line;
}

void write_report_csv(std::ostream& out, std::span<const ExperimentRow> rows) {
  out << kReportHeader << '\n';
  for (const ExperimentRow& row : rows) out << format_report_row(row) << '\n';
}

}  // namespace regmetrics

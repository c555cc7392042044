#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "regmetrics/evalbench.h"

namespace regmetrics {

inline constexpr const char* kReportHeader =
    "metric,sweep_axis,sweep_value,trials,accuracy,mean_rmse_pr,"
    "mean_eval_time_s,index_build_time_s";

// Decimal fields use 6 significant digits (printf "%.6g").
std::string format_report_row(const ExperimentRow& row);

void write_report_csv(std::ostream& out, std::span<const ExperimentRow> rows);

}  // namespace regmetrics

#ifndef PHENOID_METRICS_REPORT_H_
#define PHENOID_METRICS_REPORT_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "phenoid/metrics/metrics.h"

namespace phenoid::metrics {

struct ReportRow {
  std::string method;
  MetricsReport report;
};

// Fixed-width table, one row per method, columns Precision, Recall, F1,
// Specificity, AUC-ROC, AUC-PR (three decimals; "N/A" when not applicable).
std::string FormatReportTable(const std::vector<ReportRow>& rows);

nlohmann::json ReportToJson(const MetricsReport& r);
nlohmann::json ReportRowsToJson(const std::vector<ReportRow>& rows);

}  // namespace phenoid::metrics

#endif  // PHENOID_METRICS_REPORT_H_

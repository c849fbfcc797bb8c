#include "phenoid/metrics/report.h"

#include <algorithm>
#include <cstdio>

namespace phenoid::metrics {

namespace {

std::string Cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string Cell(const std::optional<double>& v) { return v ? Cell(*v) : "N/A"; }

std::string Pad(const std::string& s, size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string FormatReportTable(const std::vector<ReportRow>& rows) {
  size_t name_width = 6;
  for (const ReportRow& r : rows) name_width = std::max(name_width, r.method.size() + 2);
  std::string out = Pad("Method", name_width);
  for (const char* h : {"Precision", "Recall", "F1", "Specificity", "AUC-ROC", "AUC-PR"}) {
    out += Pad(h, 12);
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  out += '\n';
  for (const ReportRow& r : rows) {
    const ConfusionReport& c = r.report.confusion;
    std::string line = Pad(r.method, name_width) + Pad(Cell(c.precision), 12) +
                       Pad(Cell(c.recall), 12) + Pad(Cell(c.f1), 12) +
                       Pad(Cell(c.specificity), 12) + Pad(Cell(r.report.auc_roc), 12) +
                       Cell(r.report.auc_pr);
    out += line + '\n';
  }
  return out;
}

nlohmann::json ReportToJson(const MetricsReport& r) {
  const ConfusionReport& c = r.confusion;
  nlohmann::json j = {{"tp", c.tp},
                      {"fp", c.fp},
                      {"fn", c.fn},
                      {"tn", c.tn},
                      {"precision", c.precision},
                      {"precision_defined", c.precision_defined},
                      {"recall", c.recall},
                      {"f1", c.f1},
                      {"specificity", c.specificity}};
  j["auc_roc"] = r.auc_roc ? nlohmann::json(*r.auc_roc) : nlohmann::json("N/A");
  j["auc_pr"] = r.auc_pr ? nlohmann::json(*r.auc_pr) : nlohmann::json("N/A");
  return j;
}

nlohmann::json ReportRowsToJson(const std::vector<ReportRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const ReportRow& r : rows) {
    nlohmann::json j = ReportToJson(r.report);
    j["method"] = r.method;
    out.push_back(j);
  }
  return out;
}

}  // namespace phenoid::metrics

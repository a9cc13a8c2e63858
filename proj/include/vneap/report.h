#ifndef VNEAP_REPORT_H
#define VNEAP_REPORT_H

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace vneap {

// Deterministic outcome of one algorithm on one repetition. Wall-clock
// figures live in TimingRow so that rows compare byte for byte across runs.
struct ReportRow {
  std::string scenario;
  int repetition = 0;
  uint64_t seed = 0;
  std::string algorithm;
  std::string status = "ok";  // ok, infeasible, limit, error: <message>
  std::vector<std::pair<std::string, double>> metrics;

  void set(const std::string& name, double value);
  const double* get(const std::string& name) const;
};

struct SummaryRow {
  std::string scenario;
  std::string algorithm;
  std::string metric;
  int n = 0;
  double mean = 0;
  double variance = 0;  // sample variance, 0 when n < 2
};

struct TimingRow {
  std::string scenario;
  int repetition = 0;
  std::string algorithm;
  double seconds = 0;
  int64_t lp_iterations = 0;
};

// Long format: scenario,repetition,seed,algorithm,status,metric,value
std::string rows_to_csv(const std::vector<ReportRow>& rows);
nlohmann::json rows_to_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> rows_from_json(const nlohmann::json& j);

// Mean and variance per (scenario, algorithm, metric) over rows with status ok.
std::vector<SummaryRow> summarize(const std::vector<ReportRow>& rows);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);
std::string timings_to_csv(const std::vector<TimingRow>& rows);

std::string format_number(double value);  // %.17g

}  // namespace vneap

#endif  // VNEAP_REPORT_H

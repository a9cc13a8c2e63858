#include "vneap/report.h"

#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "vneap/domain.h"

namespace vneap {

namespace {

std::string CsvField(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void ReportRow::set(const std::string& name, double value) {
  for (auto& [k, v] : metrics) {
    if (k == name) {
      v = value;
      return;
    }
  }
  metrics.emplace_back(name, value);
}

const double* ReportRow::get(const std::string& name) const {
  for (const auto& [k, v] : metrics) {
    if (k == name) return &v;
  }
  return nullptr;
}

std::string rows_to_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "scenario,repetition,seed,algorithm,status,metric,value\n";
  for (const ReportRow& row : rows) {
    std::string prefix = CsvField(row.scenario) + "," +
                         std::to_string(row.repetition) + "," +
                         std::to_string(row.seed) + "," +
                         CsvField(row.algorithm) + "," + CsvField(row.status);
    if (row.metrics.empty()) out << prefix << ",,\n";
    for (const auto& [name, value] : row.metrics) {
      out << prefix << "," << CsvField(name) << "," << format_number(value)
          << "\n";
    }
  }
  return out.str();
}

nlohmann::json rows_to_json(const std::vector<ReportRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const ReportRow& row : rows) {
    nlohmann::json metrics = nlohmann::json::array();
    for (const auto& [name, value] : row.metrics) {
      metrics.push_back({{"metric", name}, {"value", value}});
    }
    out.push_back({{"scenario", row.scenario},
                   {"repetition", row.repetition},
                   {"seed", row.seed},
                   {"algorithm", row.algorithm},
                   {"status", row.status},
                   {"metrics", metrics}});
  }
  return out;
}

std::vector<ReportRow> rows_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("report rows: expected an array");
  std::vector<ReportRow> rows;
  try {
    for (const auto& item : j) {
      ReportRow row;
      row.scenario = item.at("scenario").get<std::string>();
      row.repetition = item.at("repetition").get<int>();
      row.seed = item.at("seed").get<uint64_t>();
      row.algorithm = item.at("algorithm").get<std::string>();
      row.status = item.at("status").get<std::string>();
      for (const auto& m : item.at("metrics")) {
        row.metrics.emplace_back(m.at("metric").get<std::string>(),
                                 m.at("value").get<double>());
      }
      rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("report rows: ") + e.what());
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ReportRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<Key, std::vector<double>> samples;
  std::vector<Key> order;
  for (const ReportRow& row : rows) {
    if (row.status != "ok") continue;
    for (const auto& [name, value] : row.metrics) {
      Key key{row.scenario, row.algorithm, name};
      auto [it, inserted] = samples.try_emplace(key);
      if (inserted) order.push_back(key);
      it->second.push_back(value);
    }
  }
  std::vector<SummaryRow> out;
  for (const Key& key : order) {
    const std::vector<double>& xs = samples[key];
    SummaryRow s;
    std::tie(s.scenario, s.algorithm, s.metric) = key;
    s.n = static_cast<int>(xs.size());
    for (double x : xs) s.mean += x;
    s.mean /= s.n;
    if (s.n > 1) {
      for (double x : xs) s.variance += (x - s.mean) * (x - s.mean);
      s.variance /= s.n - 1;
    }
    out.push_back(s);
  }
  return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "scenario,algorithm,metric,n,mean,variance\n";
  for (const SummaryRow& s : rows) {
    out << CsvField(s.scenario) << "," << CsvField(s.algorithm) << ","
        << CsvField(s.metric) << "," << s.n << "," << format_number(s.mean)
        << "," << format_number(s.variance) << "\n";
  }
  return out.str();
}

std::string timings_to_csv(const std::vector<TimingRow>& rows) {
  std::ostringstream out;
  out << "scenario,repetition,algorithm,seconds,lp_iterations\n";
  for (const TimingRow& t : rows) {
    out << CsvField(t.scenario) << "," << t.repetition << ","
        << CsvField(t.algorithm) << "," << format_number(t.seconds) << ","
        << t.lp_iterations << "\n";
  }
  return out.str();
}

}  // namespace vneap

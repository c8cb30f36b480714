#include "holovar/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "holovar/errors.hpp"

namespace holovar {

Json report_body(const Json& report) {
  Json body = report;
  body.erase("timing");
  return body;
}

SummaryTable summarize(const std::vector<Json>& reports) {
  if (reports.empty()) throw Error("summarize: need at least one report");
  struct Key {
    std::string text;
    bool operator<(const Key& o) const { return text < o.text; }
  };
  std::map<Key, SummaryRow> rows;
  for (const Json& report : reports) {
    if (!report.contains("schema") || report["schema"].get<int>() != kReportSchema) {
      throw SchemaMismatchError("summarize: unsupported report schema");
    }
    const Json& summary = report.at("summary");
    if (!summary.contains("observed_degree")) continue;  // not a degree report
    const Json& config = report.at("config");
    SummaryRow row;
    if (config.contains("group")) {
      const GroupId g = group_id_from_json(config["group"]);
      row.group = g.label();
    } else if (config.contains("finite_group")) {
      row.group = config["finite_group"].get<std::string>();
    }
    if (config.contains("surface")) {
      row.surface = surface_from_json(config["surface"]).label();
    }
    row.center_order = summary.value("center_order", 0);
    row.center_mod_squares = summary.value("center_mod_squares", 0);
    row.observed_degree = summary.value("observed_degree", -1);
    row.predicted_degree = summary.value("predicted_degree", 0);
    row.agreement = summary.value("agreement", false);
    row.exact = summary.value("exact", false);
    row.trials = row.exact ? 0 : config.value("trials", 0);

    // Deduplicate identical configurations (trial counts aside).
    Json key_config = config;
    key_config.erase("trials");
    const Key key{report["command"].get<std::string>() + "|" + key_config.dump()};
    auto it = rows.find(key);
    if (it == rows.end()) {
      rows.emplace(key, row);
    } else {
      it->second.trials += row.trials;
      if (it->second.observed_degree != row.observed_degree) {
        it->second.agreement = it->second.agreement && row.agreement;
      }
    }
  }
  SummaryTable table;
  for (auto& [key, row] : rows) table.rows.push_back(std::move(row));
  return table;
}

namespace {

std::string degree_text(int degree) {
  return degree < 0 ? std::string("-") : std::to_string(degree);
}

}  // namespace

std::string render_text(const SummaryTable& table) {
  std::ostringstream out;
  out << "group      surface         |Z|  |Z/2Z|  observed  predicted  agree  trials\n";
  for (const SummaryRow& row : table.rows) {
    const std::string trials = row.exact ? "exact" : std::to_string(row.trials);
    char line[160];
    std::snprintf(line, sizeof(line), "%-10s %-15s %3d  %6d  %8s  %9d  %5s  %s\n",
                  row.group.c_str(), row.surface.c_str(), row.center_order,
                  row.center_mod_squares, degree_text(row.observed_degree).c_str(),
                  row.predicted_degree, row.agreement ? "yes" : "NO", trials.c_str());
    out << line;
  }
  return out.str();
}

std::string render_csv(const SummaryTable& table) {
  std::ostringstream out;
  out << "group,surface,center_order,center_mod_squares,observed_degree,predicted_degree,"
         "agreement,trials,exact\n";
  for (const SummaryRow& row : table.rows) {
    out << row.group << ',' << row.surface << ',' << row.center_order << ','
        << row.center_mod_squares << ',' << degree_text(row.observed_degree) << ','
        << row.predicted_degree << ',' << (row.agreement ? "true" : "false") << ','
        << row.trials << ',' << (row.exact ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace holovar

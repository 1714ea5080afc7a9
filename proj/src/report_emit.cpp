#include <fstream>

#include "pecep/config_json.hpp"
#include "pecep/format.hpp"
#include "pecep/harness.hpp"

namespace pecep {

namespace {

nlohmann::json cell_of(double v) { return round_g9(v); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string render_cell(const nlohmann::json& cell) {
  if (cell.is_null()) return "";
  if (cell.is_string()) return csv_escape(cell.get<std::string>());
  if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
  if (cell.is_number_float()) return format_g9(cell.get<double>());
  return cell.dump();
}

void append_report_cells(std::vector<nlohmann::json>& row, const EntropyReport& r) {
  row.push_back(r.d);
  row.push_back(cell_of(r.pecep));
  row.push_back(cell_of(r.hadamard_bound));
  row.push_back(cell_of(r.whitening_gap));
  if (r.theoretical_bound) {
    row.push_back(cell_of(*r.theoretical_bound));
  } else {
    row.push_back(nullptr);
  }
  row.push_back(cell_of(r.ridge_used));
  row.push_back(r.n_residuals);
}

const std::vector<std::string> kReportColumns = {
    "d", "pecep", "hadamard_bound", "whitening_gap",
    "theoretical_bound", "ridge_used", "n_residuals"};

}  // namespace

ReportTable exp1_records_table(const std::vector<Exp1Record>& records) {
  ReportTable t;
  t.columns = {"trial", "sigma2", "n_total", "n_train", "n_test", "predictor", "seed",
               "failed", "error"};
  t.columns.insert(t.columns.end(), kReportColumns.begin(), kReportColumns.end());
  for (const Exp1Record& rec : records) {
    std::vector<nlohmann::json> row;
    row.push_back(rec.trial);
    row.push_back(cell_of(rec.sigma2));
    row.push_back(rec.n_total);
    row.push_back(rec.n_train);
    row.push_back(rec.n_test);
    row.push_back(rec.predictor);
    row.push_back(rec.seed);
    row.push_back(rec.failed);
    row.push_back(rec.error);
    append_report_cells(row, rec.report);
    t.rows.push_back(std::move(row));
  }
  return t;
}

ReportTable exp1_summary_table(const std::vector<Exp1Summary>& summary) {
  ReportTable t;
  t.columns = {"sigma2", "n_total", "predictor", "n_trials", "mean_pecep", "std_pecep",
               "mean_whitening_gap", "theoretical_bound", "mean_bound_gap"};
  for (const Exp1Summary& s : summary) {
    std::vector<nlohmann::json> row;
    row.push_back(cell_of(s.sigma2));
    row.push_back(s.n_total);
    row.push_back(s.predictor);
    row.push_back(s.n_trials);
    row.push_back(cell_of(s.mean_pecep));
    row.push_back(cell_of(s.std_pecep));
    row.push_back(cell_of(s.mean_whitening_gap));
    row.push_back(cell_of(s.theoretical_bound));
    row.push_back(cell_of(s.mean_bound_gap));
    t.rows.push_back(std::move(row));
  }
  return t;
}

ReportTable exp2_calls_table(const std::vector<CallRecord>& calls) {
  ReportTable t;
  t.columns = {"species", "clip_id", "call_index"};
  t.columns.insert(t.columns.end(), kReportColumns.begin(), kReportColumns.end());
  for (const CallRecord& rec : calls) {
    std::vector<nlohmann::json> row;
    row.push_back(rec.species);
    row.push_back(rec.clip_id);
    row.push_back(rec.call_index);
    append_report_cells(row, rec.report);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void report_emit(const ReportTable& table, const std::string& format,
                 const std::filesystem::path& path, const std::string& config_echo_json) {
  if (table.rows.empty()) {
    throw InvalidInputError("report_emit: empty record set");
  }
  if (format == "csv") {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("report_emit: cannot open " + path.string());
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) out << ",";
      out << table.columns[i];
    }
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ",";
        out << render_cell(row[i]);
      }
      out << "\n";
    }
    if (!out) throw IoError("report_emit: write failed for " + path.string());
  } else if (format == "json") {
    nlohmann::ordered_json doc;
    if (!config_echo_json.empty()) {
      doc["config"] = nlohmann::ordered_json::parse(config_echo_json);
    }
    doc["records"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < row.size(); ++i) {
        obj[table.columns[i]] = row[i];
      }
      doc["records"].push_back(std::move(obj));
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("report_emit: cannot open " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("report_emit: write failed for " + path.string());
  } else {
    throw InvalidConfigError("report_emit: unknown format '" + format + "'");
  }
}

void write_exp1_outputs(const Exp1Result& result, const std::filesystem::path& out_dir,
                        const std::string& format) {
  std::filesystem::create_directories(out_dir);
  nlohmann::ordered_json echo = result.config;
  const std::string echo_str = echo.dump();
  const ReportTable records = exp1_records_table(result.records);
  const ReportTable summary = exp1_summary_table(result.summary);
  if (format == "csv" || format == "both") {
    report_emit(records, "csv", out_dir / "exp1_records.csv");
    report_emit(summary, "csv", out_dir / "exp1_summary.csv");
  }
  if (format == "json" || format == "both") {
    report_emit(records, "json", out_dir / "exp1_records.json", echo_str);
    report_emit(summary, "json", out_dir / "exp1_summary.json", echo_str);
  }
}

void write_exp2_outputs(const RankingResult& result, const std::filesystem::path& out_dir,
                        const std::string& format) {
  std::filesystem::create_directories(out_dir);
  nlohmann::ordered_json echo = result.config;
  const std::string echo_str = echo.dump();
  const ReportTable calls = exp2_calls_table(result.calls);
  if (format == "csv" || format == "both") {
    report_emit(calls, "csv", out_dir / "exp2_calls.csv");
  }
  if (format == "json" || format == "both") {
    report_emit(calls, "json", out_dir / "exp2_calls.json", echo_str);
  }

  nlohmann::ordered_json ranking;
  ranking["config"] = echo;
  ranking["per_species"] = nlohmann::ordered_json::array();
  for (const SpeciesSummary& s : result.per_species) {
    nlohmann::ordered_json js;
    js["species"] = s.species;
    js["n_calls"] = s.n_calls;
    js["median_pecep"] = round_g9(s.median_pecep);
    js["q1"] = round_g9(s.q1);
    js["q3"] = round_g9(s.q3);
    js["iqr"] = round_g9(s.iqr);
    js["std_pecep"] = round_g9(s.std_pecep);
    js["failed"] = s.failed;
    js["error"] = s.error;
    ranking["per_species"].push_back(std::move(js));
  }
  ranking["spearman_rho"] = round_g9(result.spearman_rho);
  ranking["monotone_violations"] = result.monotone_violations;
  ranking["complete"] = result.complete;
  std::ofstream out(out_dir / "exp2_ranking.json", std::ios::trunc);
  if (!out) throw IoError("write_exp2_outputs: cannot open exp2_ranking.json");
  out << ranking.dump(2) << "\n";
}

}  // namespace pecep

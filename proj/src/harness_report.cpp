#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cuspflow/harness.hpp"

namespace cuspflow {
namespace harness {

namespace {

using OrderedJson = nlohmann::ordered_json;

// Shortest decimal that round-trips; "nan" for missing values.
std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

OrderedJson json_number(double x) {
  if (std::isnan(x)) return nullptr;  // JSON has no NaN
  return x;
}

OrderedJson row_to_json(const ReportRow& row) {
  OrderedJson j;
  j["t"] = row.t;
  j["v0"] = json_number(row.v0);
  j["t_v0"] = json_number(row.t_v0);
  j["max_k"] = json_number(row.max_k);
  j["t2_max_k"] = json_number(row.t2_max_k);
  j["witness_k0"] = json_number(row.witness_k0);
  j["t2_witness_k0"] = json_number(row.t2_witness);
  j["liyau_sup"] = json_number(row.liyau_sup);
  j["annulus_k_dev"] = json_number(row.annulus_dev);
  j["sandwich_lower_margin"] = json_number(row.sandwich_lo);
  j["sandwich_upper_margin"] = json_number(row.sandwich_hi);
  j["max_v_half"] = json_number(row.max_v_half);
  if (!row.witness_note.empty()) j["witness_note"] = row.witness_note;
  return j;
}

}  // namespace

std::string to_json_string(const RunReport& report) {
  OrderedJson j;
  j["schema"] = report.schema;
  j["experiment"] = report.experiment;
  OrderedJson cfg;
  for (const auto& [k, v] : report.config_echo) cfg[k] = v;
  j["config"] = cfg;
  OrderedJson runs = OrderedJson::array();
  for (const auto& entry : report.runs) {
    OrderedJson e;
    e["r0"] = entry.r0;
    e["r_out"] = entry.r_out;
    e["grid_n"] = entry.grid_n;
    OrderedJson rows = OrderedJson::array();
    for (const auto& row : entry.rows) rows.push_back(row_to_json(row));
    e["rows"] = rows;
    OrderedJson fit;
    fit["p"] = json_number(entry.fit.p);
    fit["c"] = json_number(entry.fit.c);
    fit["r2"] = json_number(entry.fit.r2);
    fit["window"] = {json_number(entry.fit_window[0]), json_number(entry.fit_window[1])};
    e["fit"] = fit;
    e["v_upper_c"] = json_number(entry.v_upper_c);
    e["smoothing_c"] = json_number(entry.smoothing_c);
    e["liyau_sup"] = json_number(entry.liyau_sup);
    e["dynamic_grad_sup"] = json_number(entry.dynamic_grad_sup);
    OrderedJson stats;
    stats["steps"] = entry.steps;
    stats["newton_iters"] = entry.newton_iters;
    stats["dt_smallest"] = json_number(entry.dt_smallest);
    stats["dt_largest"] = json_number(entry.dt_largest);
    e["solver"] = stats;
    runs.push_back(e);
  }
  j["runs"] = runs;
  OrderedJson asserts = OrderedJson::array();
  for (const auto& a : report.assertions) {
    OrderedJson item;
    item["name"] = a.name;
    item["passed"] = a.passed;
    item["detail"] = a.detail;
    asserts.push_back(item);
  }
  j["assertions"] = asserts;
  j["first_failure"] = report.first_failure.empty() ? OrderedJson(nullptr)
                                                    : OrderedJson(report.first_failure);
  return j.dump(2) + "\n";
}

std::string to_csv_string(const RunReport& report) {
  std::string out =
      "t,v0,t_v0,max_k,t2_max_k,witness_k0,t2_witness_k0,liyau_sup,annulus_k_dev,"
      "sandwich_lower_margin,sandwich_upper_margin\n";
  if (report.runs.empty()) return out;
  for (const auto& row : report.runs.front().rows) {
    out += fmt(row.t) + ',' + fmt(row.v0) + ',' + fmt(row.t_v0) + ',' + fmt(row.max_k) + ',' +
           fmt(row.t2_max_k) + ',' + fmt(row.witness_k0) + ',' + fmt(row.t2_witness) + ',' +
           fmt(row.liyau_sup) + ',' + fmt(row.annulus_dev) + ',' + fmt(row.sandwich_lo) + ',' +
           fmt(row.sandwich_hi) + '\n';
  }
  return out;
}

void emit_report(const RunReport& report, const std::string& format,
                 const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  auto write_file = [&](const std::string& name, const std::string& content) {
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_report: cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("emit_report: write failed for " + path.string());
  };
  if (format == "json" || format == "both") write_file("report.json", to_json_string(report));
  if (format == "csv" || format == "both") write_file("series.csv", to_csv_string(report));
}

int exit_code(const RunReport& report) { return report.first_failure.empty() ? 0 : 1; }

}  // namespace harness
}  // namespace cuspflow

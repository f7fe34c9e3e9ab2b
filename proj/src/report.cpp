#include "htp/report.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace htp {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_number(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const bool* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_number(*d);
  }
  if (const long long* i = std::get_if<long long>(&c)) return *i;
  if (const bool* b = std::get_if<bool>(&c)) return *b;
  return std::get<std::string>(c);
}

void csv_rows(std::ostream& out, const std::vector<std::string>& columns,
              const std::vector<std::vector<Cell>>& rows) {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << csv_field(columns[i]);
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(cell_text(row[i]));
    out << "\n";
  }
}

nlohmann::ordered_json json_rows(const std::vector<std::string>& columns,
                                 const std::vector<std::vector<Cell>>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json o;
    for (std::size_t i = 0; i < row.size() && i < columns.size(); ++i) o[columns[i]] = cell_json(row[i]);
    arr.push_back(std::move(o));
  }
  return arr;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const ReportMeta& meta, const Report& r) {
  out << "# tool: htp\n";
  out << "# version: " << meta.version << "\n";
  out << "# command: " << r.command << "\n";
  out << "# statement: " << r.statement << "\n";
  out << "# config_hash: " << meta.config_hash << "\n";
  out << "# seed: " << meta.seed << "\n";
  for (const auto& [k, v] : r.inputs) out << "# input." << k << ": " << v << "\n";
  for (const auto& [k, v] : r.summary) out << "# summary." << k << ": " << cell_text(v) << "\n";
  for (const auto& n : r.notes) out << "# note: " << n << "\n";
  csv_rows(out, r.columns, r.rows);
  for (const auto& s : r.sections) {
    out << "\n# section: " << s.name << "\n";
    csv_rows(out, s.columns, s.rows);
  }
}

void write_json(std::ostream& out, const ReportMeta& meta, const Report& r) {
  nlohmann::ordered_json j;
  j["tool"] = "htp";
  j["version"] = meta.version;
  j["command"] = r.command;
  j["statement"] = r.statement;
  j["config_hash"] = meta.config_hash;
  j["seed"] = meta.seed;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  j["inputs"] = inputs;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.summary) summary[k] = cell_json(v);
  j["summary"] = summary;
  j["notes"] = r.notes;
  j["columns"] = r.columns;
  j["rows"] = json_rows(r.columns, r.rows);
  for (const auto& s : r.sections) j[s.name] = json_rows(s.columns, s.rows);
  out << j.dump(2) << "\n";
}

Report to_report(const BoundReport& b, const std::string& command) {
  Report r;
  r.command = command;
  r.statement = b.statement;
  r.inputs = b.inputs;
  r.summary = {{"operation", b.operation},
               {"max_ratio", b.max_ratio},
               {"uniformity_ratio", b.uniformity_ratio},
               {"check", b.check},
               {"check_value", b.check_value},
               {"threshold", b.threshold},
               {"passed", b.passed}};
  r.notes = b.notes;
  r.columns = b.axis_names;
  for (const char* c : {"item", "measured", "bound", "ratio", "note"}) r.columns.emplace_back(c);
  for (const auto& row : b.rows) {
    std::vector<Cell> cells;
    for (double a : row.axis) cells.emplace_back(a);
    cells.emplace_back(row.item);
    cells.emplace_back(row.measured);
    cells.emplace_back(row.bound);
    cells.emplace_back(row.ratio);
    cells.emplace_back(row.note);
    r.rows.push_back(std::move(cells));
  }
  return r;
}

}  // namespace htp

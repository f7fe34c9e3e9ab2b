#pragma once

// Report tables and their CSV / JSON serialization. Both formats carry the
// same field names; CSV puts the metadata in leading "# key: value" lines.

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "htp/verify.hpp"

namespace htp {

using Cell = std::variant<double, long long, bool, std::string>;

struct TableSection {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  std::string command;
  std::string statement;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, Cell>> summary;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;
  /// Further tables, written after the main one.
  std::vector<TableSection> sections;
};

struct ReportMeta {
  std::string version;
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// %.17g, with "nan", "inf" and "-inf" for the non-finite values.
std::string format_number(double v);

void write_csv(std::ostream& out, const ReportMeta& meta, const Report& r);
void write_json(std::ostream& out, const ReportMeta& meta, const Report& r);

/// Columns: the report's axis names, then item, measured, bound, ratio, note.
Report to_report(const BoundReport& b, const std::string& command);

}  // namespace htp

#include "nvsim/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nvsim/errors.hpp"

namespace nvsim {

int CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1
                             : static_cast<int>(it - columns.begin());
}

int CsvTable::require_column(const std::string& name) const {
  const int idx = column_index(name);
  if (idx < 0) throw SchemaError("missing CSV column '" + name + "'");
  return idx;
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const int idx = require_column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");

  CsvTable table;
  std::string line;
  size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    if (!header_seen) {
      table.columns = cells;
      header_seen = true;
      continue;
    }
    if (cells.size() != table.columns.size())
      throw SchemaError(path + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(table.columns.size()) +
                        " fields, got " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (size_t c = 0; c < cells.size(); ++c) {
      try {
        size_t used = 0;
        const double v = std::stod(cells[c], &used);
        while (used < cells[c].size() &&
               std::isspace(static_cast<unsigned char>(cells[c][used])))
          ++used;
        if (used != cells[c].size()) throw std::invalid_argument("trailing");
        row.push_back(v);
      } catch (const std::exception&) {
        throw SchemaError(path + ":" + std::to_string(line_no) +
                          ": cannot parse numeric field '" + cells[c] +
                          "' in column '" + table.columns[c] + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!header_seen) throw SchemaError(path + ": empty file, no header row");
  if (table.rows.empty())
    throw SchemaError(path + ": no data rows");
  return table;
}

void require_columns(const CsvTable& table,
                     const std::vector<std::string>& expected) {
  for (const auto& name : expected) table.require_column(name);
  for (const auto& have : table.columns) {
    if (std::find(expected.begin(), expected.end(), have) == expected.end())
      throw SchemaError("unexpected CSV column '" + have +
                        "' (check units in the header)");
  }
}

std::string format_double(double v) {
  // shortest representation that round-trips exactly
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::stod(buf) == v) break;
  }
  return buf;
}

void write_csv(const std::string& path, const std::string& header_comment,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  for (size_t c = 0; c < columns.size(); ++c)
    out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::invalid_argument("write_csv: row width mismatch");
    for (size_t c = 0; c < row.size(); ++c)
      out << format_double(row[c]) << (c + 1 < row.size() ? "," : "\n");
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace nvsim

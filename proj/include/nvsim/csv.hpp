#pragma once

#include <map>
#include <string>
#include <vector>

namespace nvsim {

// Column-oriented CSV with a mandatory header row. Lines starting with '#'
// are comments; the writer puts the tool version and config hash there.
// Column names embed the unit (f_ghz, t_ns, bz_G, x_um).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const;            // -1 if absent
  int require_column(const std::string& name) const;          // SchemaError
  std::vector<double> column(const std::string& name) const;  // SchemaError
  size_t row_count() const { return rows.size(); }
};

// Throws IoError when unreadable, SchemaError on malformed rows (message
// carries the 1-based line number) or on an empty table.
CsvTable read_csv(const std::string& path);

// Checks that exactly the expected columns are present, in any order.
void require_columns(const CsvTable& table,
                     const std::vector<std::string>& expected);

void write_csv(const std::string& path, const std::string& header_comment,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

// Deterministic shortest round-trip formatting used for all numeric output.
std::string format_double(double v);

}  // namespace nvsim

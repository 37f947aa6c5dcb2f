#pragma once

#include <string>
#include <vector>

namespace hebart {

// A parsed CSV file: header row plus rows of string cells.
// UTF-8, comma separators, '.' decimal point, optional double quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const;  // throws Schema error if absent
  bool has_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const CsvTable& table);

// Cell -> double with row/column context on failure.
double parse_numeric_cell(const std::string& cell, std::size_t row, const std::string& column);

}  // namespace hebart

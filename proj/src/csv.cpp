#include "hebart/csv.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hebart/util.hpp"

namespace hebart {

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t row) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  if (quoted) {
    fail(ErrorKind::Schema, "unterminated quote in CSV row " + std::to_string(row));
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  fail(ErrorKind::Schema, "missing column '" + name + "'");
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open file '" + path + "'");
  CsvTable table;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);  // strip UTF-8 BOM
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line, row);
    for (auto& c : cells) c = trim(c);
    if (row == 1) {
      table.header = std::move(cells);
    } else {
      if (cells.size() != table.header.size()) {
        fail(ErrorKind::Schema, "row " + std::to_string(row) + " of '" + path + "' has " +
                                    std::to_string(cells.size()) + " cells, expected " +
                                    std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) fail(ErrorKind::Schema, "'" + path + "' has no header row");
  return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write file '" + path + "'");
  auto write_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out << ',';
      bool needs_quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (needs_quote) {
        out << '"';
        for (char c : cells[i]) {
          if (c == '"') out << '"';
          out << c;
        }
        out << '"';
      } else {
        out << cells[i];
      }
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& r : table.rows) write_row(r);
  if (!out) fail(ErrorKind::Io, "error writing '" + path + "'");
}

double parse_numeric_cell(const std::string& cell, std::size_t row, const std::string& column) {
  if (cell.empty()) {
    fail(ErrorKind::Schema,
         "empty cell at row " + std::to_string(row) + ", column '" + column + "'");
  }
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
    fail(ErrorKind::Schema, "non-numeric value '" + cell + "' at row " + std::to_string(row) +
                                ", column '" + column + "'");
  }
  return v;
}

}  // namespace hebart

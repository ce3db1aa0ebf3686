#include "dwt/csv.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>

#include "dwt/common.hpp"

namespace dwt {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open file: " + path);
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    auto cells = split_line(line);
    for (auto& c : cells) c = trim(c);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != table.header.size())
        throw data_error(path + ": row " + std::to_string(table.rows.size() + 1) +
                         " has " + std::to_string(cells.size()) +
                         " cells, expected " + std::to_string(table.header.size()));
      table.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw data_error(path + ": empty file");
  return table;
}

namespace {

// RFC-style quoting for cells that contain separators or quotes.
std::string quoted(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void write_csv(const std::string& path,
               const std::vector<std::string>& comments,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write file: " + path);
  for (const auto& c : comments) out << "# " << c << "\n";
  for (std::size_t j = 0; j < header.size(); ++j)
    out << quoted(header[j]) << (j + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows)
    for (std::size_t j = 0; j < row.size(); ++j)
      out << quoted(row[j]) << (j + 1 < row.size() ? "," : "\n");
  if (!out) throw data_error("write failed: " + path);
}

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(cell.c_str(), &end);
  return errno == 0 && end == cell.c_str() + cell.size() && out == out;
}

}  // namespace dwt

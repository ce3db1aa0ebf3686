#pragma once

#include <string>
#include <vector>

namespace dwt {

// Minimal CSV table: header row plus string cells. Lines starting with '#'
// are treated as comments and skipped on read.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);

// Writes comments (each prefixed with "# "), then the header, then the rows.
void write_csv(const std::string& path,
               const std::vector<std::string>& comments,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// strtod-style full-string parse; throws nothing, reports success.
bool parse_double(const std::string& cell, double& out);

}  // namespace dwt

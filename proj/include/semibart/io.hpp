#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

namespace semibart {

struct Table {
  std::vector<std::string> header;
  Eigen::MatrixXd values;  // rows x header.size()
};

// Strict numeric CSV: one header line, '.' decimals, no quoting. Ragged rows,
// empty cells, and non-numeric cells raise with 1-based row/column positions.
Table read_table(const std::string& path);

// Writes content to a temp file in the same directory, then renames it over
// `path`, so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Flat "key=value" lines; '#' starts a comment.
std::map<std::string, std::string> read_key_values(const std::string& path);
void write_key_values_atomic(const std::string& path,
                             const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace semibart

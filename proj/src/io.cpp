#include "semibart/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace semibart {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
  Table t;
  t.header = split_csv_line(line);
  for (auto& name : t.header) name = trimmed(name);
  const std::size_t ncol = t.header.size();
  for (std::size_t c = 0; c < ncol; ++c) {
    if (t.header[c].empty())
      throw std::runtime_error(path + ": empty header name in column " + std::to_string(c + 1));
  }

  std::vector<double> data;
  std::size_t nrow = 0;
  while (std::getline(in, line)) {
    if (line.empty() && in.eof()) break;  // trailing newline
    ++nrow;
    const auto fields = split_csv_line(line);
    if (fields.size() != ncol) {
      throw std::runtime_error(path + ": row " + std::to_string(nrow) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(ncol));
    }
    for (std::size_t c = 0; c < ncol; ++c) {
      const std::string cell = trimmed(fields[c]);
      if (cell.empty()) {
        throw std::runtime_error(path + ": missing value at row " + std::to_string(nrow) +
                                 ", column " + std::to_string(c + 1) + " (" + t.header[c] + ")");
      }
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
        throw std::runtime_error(path + ": non-numeric value \"" + cell + "\" at row " +
                                 std::to_string(nrow) + ", column " + std::to_string(c + 1) +
                                 " (" + t.header[c] + ")");
      }
      data.push_back(v);
    }
  }

  t.values.resize(static_cast<Eigen::Index>(nrow), static_cast<Eigen::Index>(ncol));
  for (std::size_t r = 0; r < nrow; ++r)
    for (std::size_t c = 0; c < ncol; ++c)
      t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r * ncol + c];
  return t;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + tmp);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path + ": " + std::strerror(errno));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trimmed(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ": line " + std::to_string(lineno) + " is not key=value");
    kv[trimmed(s.substr(0, eq))] = trimmed(s.substr(eq + 1));
  }
  return kv;
}

void write_key_values_atomic(const std::string& path,
                             const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string content;
  for (const auto& [k, v] : entries) content += k + "=" + v + "\n";
  write_file_atomic(path, content);
}

}  // namespace semibart

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vscreen/core/errors.hpp"

namespace vscreen {

// Minimal CSV support: comma separator, optional double-quote quoting with
// "" escapes. Enough for the dataset and result formats used here.

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c == '\r') {
      // tolerate CRLF
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

class CsvReader {
 public:
  explicit CsvReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw DataError("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in_, line)) throw DataError("empty CSV file: " + path);
    header_ = split_csv_line(line);
  }

  const std::vector<std::string>& header() const { return header_; }

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
      if (header_[i] == name) return static_cast<int>(i);
    return -1;
  }

  int require_column(const std::string& name) const {
    int c = column(name);
    if (c < 0)
      throw DataError(path_ + ": missing required column '" + name + "'");
    return c;
  }

  // Returns false at EOF. Skips blank lines.
  bool next(std::vector<std::string>& row) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.empty() || line == "\r") continue;
      row = split_csv_line(line);
      if (row.size() != header_.size())
        throw DataError(path_ + ":" + std::to_string(line_no_ + 1) +
                        ": expected " + std::to_string(header_.size()) +
                        " fields, got " + std::to_string(row.size()));
      return true;
    }
    return false;
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  std::size_t line_no_ = 0;
};

}  // namespace vscreen

//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "synthrank/csv.hpp"

#include <fstream>
#include <sstream>

#include "synthrank/errors.hpp"

namespace synthrank {

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int CsvTable::require_column(const std::string& name) const {
  int idx = column(name);
  if (idx < 0) {
    throw IoError("input is missing the required column '" + name + "'");
  }
  return idx;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == delim) {
      out.push_back(field);
      field.clear();
    } else if (c == '\r' && i + 1 == line.size()) {
      // drop trailing CR
    } else {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text, char delim) {
  std::istringstream is(text);
  std::string line;
  CsvTable table;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    if (first) {
      if (delim == 0) {
        delim = line.find('\t') != std::string::npos ? '\t' : ',';
      }
      table.header = split_line(line, delim);
      first = false;
    } else {
      table.rows.push_back(split_line(line, delim));
    }
  }
  if (first) throw IoError("empty delimited input: no header row");
  return table;
}

CsvTable read_csv(const std::string& path, char delim) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  try {
    return parse_csv(buf.str(), delim);
  } catch (const IoError&) {
    throw IoError("cannot parse " + path + ": no header row");
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os << ',';
      const std::string& f = fields[i];
      if (f.find_first_of(",\"\n") != std::string::npos) {
        os << '"';
        for (char c : f) {
          if (c == '"') os << '"';
          os << c;
        }
        os << '"';
      } else {
        os << f;
      }
    }
    os << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  if (!os) throw IoError("failed writing " + path);
}

}  // namespace synthrank

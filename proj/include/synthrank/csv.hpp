//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_CSV_HPP
#define SYNTHRANK_CSV_HPP

#include <string>
#include <vector>

namespace synthrank {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by header name, -1 when absent.
  int column(const std::string& name) const;
  int require_column(const std::string& name) const;  // throws IoError
};

// Reads a delimited text file with a header row. delim = 0 sniffs ',' vs
// '\t' from the header line. Quoted fields are handled the usual way.
CsvTable read_csv(const std::string& path, char delim = 0);
CsvTable parse_csv(const std::string& text, char delim = 0);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace synthrank

#endif

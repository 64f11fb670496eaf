#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace msid {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
  const std::vector<double>& column(const std::string& name) const;
};

// All floats written with max_digits10 so records round-trip bit-exactly.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace msid

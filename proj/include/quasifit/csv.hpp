#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "quasifit/dataset.hpp"

namespace quasifit {

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws CsvError if absent
};

// Strict numeric CSV: one header row, comma separators, '.' decimal points.
CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Interprets columns x1..xd as the design matrix and y as the response;
// other columns are ignored.
DataSet dataset_from_table(const CsvTable& table);

// Design points only (no y column required).
std::vector<std::vector<double>> points_from_table(const CsvTable& table);

}  // namespace quasifit

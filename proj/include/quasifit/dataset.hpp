#pragma once

#include <cstddef>
#include <vector>

#include "quasifit/shape.hpp"

namespace quasifit {

// Regression sample: n design points in R^d with responses and positive
// weights. Weights default to 1 and otherwise arise from duplicate
// aggregation.
struct DataSet {
  std::vector<std::vector<double>> x;  // n rows, d columns
  std::vector<double> y;
  std::vector<double> w;               // empty means all-ones

  std::size_t size() const { return x.size(); }
  std::size_t dim() const { return x.empty() ? 0 : x.front().size(); }
  double weight(std::size_t i) const { return w.empty() ? 1.0 : w[i]; }
};

// Throws std::invalid_argument on empty data, ragged rows, nonfinite
// entries, nonpositive weights, or mismatched lengths.
void validate(const DataSet& data);

// Groups rows with identical design points into one weighted observation.
// `group_of[i]` maps each original row to its group index.
struct AggregatedData {
  DataSet data;                      // distinct design points
  std::vector<std::size_t> group_of; // original row -> group
};

AggregatedData aggregate_duplicates(const DataSet& data);

// Applies the canonicalizing sign flips for `shape` to a copy of the data.
DataSet apply_flips(const DataSet& data, const CanonicalMap& map);

}  // namespace quasifit

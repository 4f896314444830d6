#include "quasifit/dataset.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace quasifit {

void validate(const DataSet& data) {
  const std::size_t n = data.x.size();
  if (n == 0) throw std::invalid_argument("empty dataset");
  if (data.y.size() != n)
    throw std::invalid_argument("y length does not match number of rows");
  if (!data.w.empty() && data.w.size() != n)
    throw std::invalid_argument("weight length does not match number of rows");
  const std::size_t d = data.x.front().size();
  if (d == 0) throw std::invalid_argument("zero-dimensional design points");
  for (std::size_t i = 0; i < n; ++i) {
    if (data.x[i].size() != d)
      throw std::invalid_argument("ragged design matrix");
    for (double v : data.x[i])
      if (!std::isfinite(v)) throw std::invalid_argument("nonfinite design entry");
    if (!std::isfinite(data.y[i]))
      throw std::invalid_argument("nonfinite response");
    if (!data.w.empty() && !(data.w[i] > 0.0 && std::isfinite(data.w[i])))
      throw std::invalid_argument("weights must be positive and finite");
  }
}

AggregatedData aggregate_duplicates(const DataSet& data) {
  validate(data);
  AggregatedData out;
  out.group_of.resize(data.size());
  std::map<std::vector<double>, std::size_t> seen;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto [it, inserted] = seen.try_emplace(data.x[i], out.data.x.size());
    const std::size_t g = it->second;
    out.group_of[i] = g;
    const double wi = data.weight(i);
    if (inserted) {
      out.data.x.push_back(data.x[i]);
      out.data.y.push_back(data.y[i] * wi);
      out.data.w.push_back(wi);
    } else {
      out.data.y[g] += data.y[i] * wi;
      out.data.w[g] += wi;
    }
  }
  // y currently holds weighted sums; divide out to get group means.
  for (std::size_t g = 0; g < out.data.size(); ++g) out.data.y[g] /= out.data.w[g];
  return out;
}

DataSet apply_flips(const DataSet& data, const CanonicalMap& map) {
  DataSet out = data;
  if (map.flip_x)
    for (auto& row : out.x)
      for (double& v : row) v = -v;
  if (map.flip_y)
    for (double& v : out.y) v = -v;
  return out;
}

}  // namespace quasifit

#include "quasifit/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace quasifit {

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw CsvError("missing column: " + name);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw CsvError(path + ": empty file");
  for (const auto& h : split_line(line)) table.header.push_back(strip(h));
  if (table.header.empty()) throw CsvError(path + ": empty header");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != table.header.size())
      throw CsvError(path + ":" + std::to_string(lineno) + ": wrong cell count");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      const std::string v = strip(cell);
      try {
        std::size_t used = 0;
        row.push_back(std::stod(v, &used));
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        throw CsvError(path + ":" + std::to_string(lineno) + ": bad number '" + v + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot write " + path);
  out.precision(17);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 == header.size() ? '\n' : ',');
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 == row.size() ? '\n' : ',');
  }
}

namespace {

std::vector<std::size_t> design_columns(const CsvTable& table) {
  // Contiguous names x1..xd, located by name so extra columns can ride along.
  std::vector<std::size_t> cols;
  for (std::size_t d = 1;; ++d) {
    const std::string name = "x" + std::to_string(d);
    bool found = false;
    for (std::size_t i = 0; i < table.header.size(); ++i)
      if (table.header[i] == name) { cols.push_back(i); found = true; break; }
    if (!found) break;
  }
  if (cols.empty()) throw CsvError("no x1..xd columns found");
  return cols;
}

}  // namespace

DataSet dataset_from_table(const CsvTable& table) {
  const auto cols = design_columns(table);
  const std::size_t ycol = table.column("y");
  if (table.rows.empty()) throw CsvError("no data rows");
  DataSet data;
  data.x.reserve(table.rows.size());
  data.y.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    std::vector<double> pt(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) pt[k] = row[cols[k]];
    data.x.push_back(std::move(pt));
    data.y.push_back(row[ycol]);
  }
  validate(data);
  return data;
}

std::vector<std::vector<double>> points_from_table(const CsvTable& table) {
  const auto cols = design_columns(table);
  if (table.rows.empty()) throw CsvError("no data rows");
  std::vector<std::vector<double>> pts;
  pts.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    std::vector<double> pt(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) pt[k] = row[cols[k]];
    pts.push_back(std::move(pt));
  }
  return pts;
}

}  // namespace quasifit

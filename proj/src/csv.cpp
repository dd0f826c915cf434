#include "fmq/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fmq {

void CsvTable::add(std::string name, Eigen::VectorXd values) {
  if (!columns.empty() && values.size() != rows())
    throw std::invalid_argument("column '" + name + "' has " + std::to_string(values.size()) +
                                " rows, expected " + std::to_string(rows()));
  columns.emplace_back(std::move(name), std::move(values));
}

Eigen::Index CsvTable::rows() const { return columns.empty() ? 0 : columns.front().second.size(); }

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string to_csv_text(const CsvTable& t) {
  std::string out;
  for (const auto& c : t.comments) out += c.empty() ? "#\n" : "# " + c + "\n";
  for (std::size_t j = 0; j < t.columns.size(); ++j)
    out += (j ? "," : "") + t.columns[j].first;
  out += "\n";
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      if (j) out += ",";
      out += format_value(t.columns[j].second[i]);
    }
    out += "\n";
  }
  return out;
}

void write_csv(const CsvTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << to_csv_text(t);
  out.flush();
  if (!out) throw std::runtime_error(path + ": write failed");
}

CsvData parse_csv(const std::string& text) {
  CsvData d;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      d.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (d.header.empty()) {
      d.header = cells;
      continue;
    }
    if (cells.size() != d.header.size())
      throw std::runtime_error("csv row with " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(d.header.size()));
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
    d.rows.push_back(std::move(row));
  }
  return d;
}

CsvData read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace fmq

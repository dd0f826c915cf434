// CSV tables with `#` provenance comments.
#pragma once

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

namespace fmq {

struct CsvTable {
  std::vector<std::string> comments;  // written as "# <line>"
  std::vector<std::pair<std::string, Eigen::VectorXd>> columns;

  void add(std::string name, Eigen::VectorXd values);
  Eigen::Index rows() const;
};

/// 12 significant digits; non-finite values as nan, inf, -inf.
std::string format_value(double v);

std::string to_csv_text(const CsvTable& t);

/// Throws std::runtime_error naming the path on failure.
void write_csv(const CsvTable& t, const std::string& path);

struct CsvData {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvData parse_csv(const std::string& text);
CsvData read_csv(const std::string& path);

}  // namespace fmq

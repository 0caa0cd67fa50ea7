#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace deadcore {

/// Locale-independent shortest-safe text: 17 significant digits.
std::string format_double(double x);

using CsvCell = std::variant<double, long, std::string>;

/// Comma-separated file with a header line; doubles use format_double.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::vector<std::string> header);
  void row(const std::vector<CsvCell>& cells);
  std::size_t rows() const { return rows_; }

 private:
  std::ofstream out_;
  std::size_t width_ = 0;
  std::size_t rows_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws InvalidArgument when missing.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace deadcore

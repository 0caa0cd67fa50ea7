#include "deadcore/csv.hpp"

#include <charconv>
#include <cmath>

#include <boost/algorithm/string.hpp>

#include "deadcore/errors.hpp"

namespace deadcore {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> header) : out_(path), width_(header.size()) {
  if (!out_) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  out_ << boost::algorithm::join(header, ",") << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != width_) throw Error(ErrorKind::InvalidArgument, "CSV row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) out_ << format_double(v);
          else if constexpr (std::is_same_v<T, long>) out_ << std::to_string(v);
          else out_ << v;
        },
        cells[i]);
  }
  out_ << '\n';
  ++rows_;
  out_.flush();
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error(ErrorKind::InvalidArgument, "CSV has no column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read '" + path + "'");
  CsvTable out;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::InvalidArgument, "'" + path + "' is empty");
  boost::algorithm::split(out.header, line, boost::is_any_of(","));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    boost::algorithm::split(cells, line, boost::is_any_of(","));
    if (cells.size() != out.header.size()) throw Error(ErrorKind::InvalidArgument, "ragged row in '" + path + "'");
    out.rows.push_back(std::move(cells));
  }
  return out;
}

}  // namespace deadcore

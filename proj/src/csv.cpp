#include "mplq/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "mplq/errors.hpp"

namespace mplq::csv {

std::vector<Row> parse(const std::string& text) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    Row row;
    std::size_t begin = 0;
    while (true) {
      const auto comma = line.find(',', begin);
      row.push_back(line.substr(begin, comma - begin));
      if (comma == std::string::npos) break;
      begin = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double to_double(const std::string& field) {
  if (field == "nan") return std::nan("");
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ParseError("not a number: '" + field + "'");
  return v;
}

int to_int(const std::string& field) {
  int v = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ParseError("not an integer: '" + field + "'");
  return v;
}

std::string header_line(const std::vector<std::pair<std::string, std::string>>& config) {
  std::string out = "#";
  for (const auto& [k, v] : config) out += " " + k + "=" + v;
  return out + "\n";
}

std::string format(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace mplq::csv

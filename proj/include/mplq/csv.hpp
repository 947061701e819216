#pragma once

#include <string>
#include <vector>

namespace mplq::csv {

using Row = std::vector<std::string>;

// Splits plain comma-separated text (no quoting). Lines starting with '#'
// and blank lines are skipped; the header row is returned as row 0.
std::vector<Row> parse(const std::string& text);

double to_double(const std::string& field);
int to_int(const std::string& field);

// "# key=value key=value" provenance line.
std::string header_line(const std::vector<std::pair<std::string, std::string>>& config);

// Shortest text that reads back to the same double.
std::string format(double value);

}  // namespace mplq::csv

#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace citedyn::csv {

/// Shortest round-trip representation; identical on every run.
std::string format_number(double value);

/// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> parse_line(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position by name; throws InputError when absent.
  std::size_t column(std::string_view name) const;
};
Table read_table(std::istream& in);

}  // namespace citedyn::csv

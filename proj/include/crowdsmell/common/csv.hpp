#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace crowdsmell::csv {

using Row = std::vector<std::string>;

/// A parsed CSV document. Lines starting with '#' before the header are
/// kept verbatim (without the leading "# ") as metadata.
struct Document {
  std::vector<std::string> comments;
  Row header;
  std::vector<Row> rows;
};

// RFC 4180 quoting: fields containing ',', '"', CR or LF are quoted.
std::string escape_field(std::string_view field);
std::string format_row(const Row& row);

Document parse(std::string_view text);
Document read_file(const std::string& path);

/// Shortest decimal form that parses back to the same double.
std::string format_real(double value);
double parse_real(std::string_view text);

}  // namespace crowdsmell::csv

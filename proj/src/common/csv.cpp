#include "crowdsmell/common/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "crowdsmell/error.hpp"

namespace crowdsmell::csv {

std::string escape_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_row(const Row& row) {
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += ',';
    line += escape_field(row[i]);
  }
  return line;
}

namespace {

// Splits one logical record starting at pos; advances pos past the newline.
Row parse_record(std::string_view text, std::size_t& pos, int line_no) {
  Row row;
  std::string field;
  bool quoted = false;
  bool after_quote = false;
  while (pos < text.size()) {
    char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field += '"';
          pos += 2;
          continue;
        }
        quoted = false;
        after_quote = true;
        ++pos;
        continue;
      }
      field += c;
      ++pos;
      continue;
    }
    if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      after_quote = false;
      ++pos;
      continue;
    }
    if (c == '\r' || c == '\n') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      row.push_back(std::move(field));
      return row;
    }
    if (c == '"' && field.empty() && !after_quote) {
      quoted = true;
      ++pos;
      continue;
    }
    if (after_quote) {
      throw Error(ErrorCode::SchemaMismatch,
                  "malformed quoted field on line " + std::to_string(line_no));
    }
    field += c;
    ++pos;
  }
  if (quoted) {
    throw Error(ErrorCode::SchemaMismatch,
                "unterminated quoted field on line " + std::to_string(line_no));
  }
  row.push_back(std::move(field));
  return row;
}

}  // namespace

Document parse(std::string_view text) {
  Document doc;
  std::size_t pos = 0;
  int line_no = 1;
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  bool have_header = false;
  while (pos < text.size()) {
    if (!have_header && text[pos] == '#') {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos + 1, end - pos - 1);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      doc.comments.emplace_back(line);
      pos = end + 1;
      ++line_no;
      continue;
    }
    if (text[pos] == '\n' || text[pos] == '\r') {
      // Blank line.
      if (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      ++line_no;
      continue;
    }
    Row row = parse_record(text, pos, line_no);
    ++line_no;
    if (!have_header) {
      doc.header = std::move(row);
      have_header = true;
    } else {
      doc.rows.push_back(std::move(row));
    }
  }
  return doc;
}

Document read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string format_real(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "unformattable number");
  return std::string(buf, end);
}

double parse_real(std::string_view text) {
  double value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw Error(ErrorCode::SchemaMismatch, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace crowdsmell::csv

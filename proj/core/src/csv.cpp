#include "mbsts/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mbsts/linalg.hpp"

namespace mbsts {

int CsvTable::col_index(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int CsvTable::require_col(const std::string& name) const {
  const int idx = col_index(name);
  if (idx < 0) throw invalid_argument("csv: required column '" + name + "' not found");
  return idx;
}

namespace {

std::vector<std::string> split_line(const std::string& text, size_t& pos, bool& saw_any) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  saw_any = false;
  while (pos < text.size()) {
    const char ch = text[pos];
    saw_any = true;
    if (in_quotes) {
      if (ch == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          ++pos;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      ++pos;
      fields.push_back(std::move(field));
      return fields;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
    ++pos;
  }
  if (in_quotes) throw invalid_argument("csv: unterminated quoted field");
  if (saw_any) fields.push_back(std::move(field));
  return fields;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  size_t pos = 0;
  bool saw_any = false;
  table.header = split_line(text, pos, saw_any);
  if (!saw_any || table.header.empty()) throw invalid_argument("csv: missing header row");
  while (pos < text.size()) {
    auto fields = split_line(text, pos, saw_any);
    if (!saw_any || fields.empty()) break;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != table.header.size()) {
      throw invalid_argument("csv: row " + std::to_string(table.rows.size() + 1) + " has " +
                             std::to_string(fields.size()) + " fields, header has " +
                             std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_argument("csv: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

namespace {

void append_field(std::string& out, const std::string& field) {
  const bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) {
    out += field;
    return;
  }
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
}

}  // namespace

std::string csv_to_string(const CsvTable& table) {
  std::string out;
  for (size_t i = 0; i < table.header.size(); ++i) {
    if (i) out.push_back(',');
    append_field(out, table.header[i]);
  }
  out.push_back('\n');
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      append_field(out, row[i]);
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_argument("csv: cannot write '" + path + "'");
  out << csv_to_string(table);
}

std::string format_double(double v) {
  char buf[32];
  // Shortest round-trip representation.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  return buf;
}

double parse_double(const std::string& field, const std::string& context) {
  if (field.empty()) throw invalid_argument(context + ": missing value");
  const char* begin = field.data();
  const char* end = begin + field.size();
  double value = 0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw invalid_argument(context + ": cannot parse number '" + field + "'");
  }
  return value;
}

}  // namespace mbsts

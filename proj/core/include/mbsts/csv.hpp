#ifndef MBSTS_CSV_HPP_
#define MBSTS_CSV_HPP_

#include <string>
#include <vector>

namespace mbsts {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col_index(const std::string& name) const;  // -1 when absent
  int require_col(const std::string& name) const;
};

// Strict RFC4180-style parsing: quoted fields with "" escapes, all rows must
// match the header width, empty fields are preserved as empty strings.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);
std::string csv_to_string(const CsvTable& table);

// Shortest representation that round-trips the double exactly.
std::string format_double(double v);
double parse_double(const std::string& field, const std::string& context);

}  // namespace mbsts

#endif  // MBSTS_CSV_HPP_

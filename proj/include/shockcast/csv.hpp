#pragma once

#include <string>
#include <vector>

namespace shockcast {

// Minimal RFC-4180-ish CSV table. Values are kept as strings; numeric
// conversion happens at the call site where a row number is known.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name, -1 if absent.
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& origin = "<string>");
void write_csv(const std::string& path, const CsvTable& table);
std::string format_csv(const CsvTable& table);

// Quotes a field if it contains a comma, quote, or newline.
std::string csv_quote(const std::string& field);

}  // namespace shockcast

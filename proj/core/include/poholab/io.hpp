#pragma once

#include <string>
#include <vector>

namespace poholab {

/// Locale-independent shortest round-trip formatting (std::to_chars).
std::string format_double(double v);

/// CSV with '.' decimal, comma separator, one header row. Rows are written
/// atomically (temp file then rename).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string to_string() const;
};

void write_text_atomic(const std::string& path, const std::string& contents);
void write_csv_atomic(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace poholab

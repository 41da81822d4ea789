#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace fbmavg {

/// One machine-readable result file. Reals are written with 17
/// significant digits (exact double round-trip), metadata and footer
/// entries as '# key=value' comment lines around an RFC-4180-style body.
struct ResultTable {
    using Cell = std::variant<double, std::int64_t, std::string>;

    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, std::string>> metadata; // before the header row
    std::vector<std::pair<std::string, std::string>> footer;   // after the last row

    void add_row(std::vector<Cell> cells);
};

std::string format_cell(const ResultTable::Cell& cell);

void write_csv(const ResultTable& table, const std::string& path);

/// Reader view: cells come back as text; format_cell output is preserved
/// exactly, so re-reading a written file reproduces the table.
struct CsvFile {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> footer;

    double number(std::size_t row, std::string_view column) const;
    const std::string& text(std::size_t row, std::string_view column) const;
    std::size_t column_index(std::string_view column) const;
};

CsvFile read_csv(const std::string& path);

} // namespace fbmavg

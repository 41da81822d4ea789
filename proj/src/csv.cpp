#include "fbmavg/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fbmavg {

void ResultTable::add_row(std::vector<Cell> cells) {
    if (cells.size() != columns.size())
        throw std::invalid_argument("ResultTable: row width does not match column count");
    rows.push_back(std::move(cells));
}

std::string format_cell(const ResultTable::Cell& cell) {
    if (const double* d = std::get_if<double>(&cell)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", *d);
        return buf;
    }
    if (const std::int64_t* i = std::get_if<std::int64_t>(&cell)) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(*i));
        return buf;
    }
    const std::string& s = std::get<std::string>(cell);
    if (s.find_first_of(",\n\r\"") != std::string::npos)
        throw std::invalid_argument("ResultTable: string cells must not need quoting: " + s);
    return s;
}

void write_csv(const ResultTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");
    for (const auto& [key, value] : table.metadata)
        out << "# " << key << "=" << value << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << format_cell(row[c]) << (c + 1 < row.size() ? "," : "");
        out << "\n";
    }
    for (const auto& [key, value] : table.footer)
        out << "# " << key << "=" << value << "\n";
    if (!out)
        throw std::runtime_error("write_csv: write to '" + path + "' failed");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::pair<std::string, std::string> parse_comment(const std::string& line) {
    std::string body = line.substr(1);
    if (!body.empty() && body.front() == ' ')
        body.erase(body.begin());
    const auto eq = body.find('=');
    if (eq == std::string::npos)
        return {body, ""};
    return {body.substr(0, eq), body.substr(eq + 1)};
}

} // namespace

CsvFile read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("read_csv: cannot open '" + path + "'");
    CsvFile file;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line.front() == '#') {
            (header_seen ? file.footer : file.metadata).push_back(parse_comment(line));
            continue;
        }
        if (!header_seen) {
            file.columns = split_line(line);
            header_seen = true;
        } else {
            auto cells = split_line(line);
            if (cells.size() != file.columns.size())
                throw std::runtime_error("read_csv: ragged row in '" + path + "'");
            file.rows.push_back(std::move(cells));
        }
    }
    if (!header_seen)
        throw std::runtime_error("read_csv: no header row in '" + path + "'");
    return file;
}

std::size_t CsvFile::column_index(std::string_view column) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == column)
            return i;
    throw std::out_of_range("CsvFile: no column named '" + std::string(column) + "'");
}

double CsvFile::number(std::size_t row, std::string_view column) const {
    return std::strtod(rows.at(row).at(column_index(column)).c_str(), nullptr);
}

const std::string& CsvFile::text(std::size_t row, std::string_view column) const {
    return rows.at(row).at(column_index(column));
}

} // namespace fbmavg

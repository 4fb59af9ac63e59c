#pragma once

#include <string>
#include <vector>

namespace ics::csv {

// Minimal CSV with the conventions used throughout: UTF-8, ',' delimiter,
// '.' decimal point, mandatory header row, no quoting of numeric fields.
// Fields containing commas or quotes are double-quoted on write and
// unquoted on read.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int ncols() const { return static_cast<int>(header.size()); }
    int nrows() const { return static_cast<int>(rows.size()); }
    // Column index by header name; -1 when absent.
    int column(const std::string& name) const;
};

Table read_csv(const std::string& path);
void write_csv(const std::string& path, const Table& table);

double to_double(const std::string& field);

// Shortest round-trip representation (%.17g trimmed via %g fallback).
std::string format_double(double x);

} // namespace ics::csv

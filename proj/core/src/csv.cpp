#include "ics/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ics/errors.hpp"

namespace ics::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string quote_if_needed(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

} // namespace

int Table::column(const std::string& name) const {
    for (size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return static_cast<int>(j);
    return -1;
}

Table read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file: " + path);
    Table table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("CSV file is empty (header required): " + path);
    table.header = split_line(line);
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != table.header.size())
            throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(table.header.size()) + " fields, got " +
                          std::to_string(fields.size()));
        table.rows.push_back(std::move(fields));
    }
    return table;
}

void write_csv(const std::string& path, const Table& table) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write CSV file: " + path);
    for (size_t j = 0; j < table.header.size(); ++j) {
        if (j) out << ',';
        out << quote_if_needed(table.header[j]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            out << quote_if_needed(row[j]);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

double to_double(const std::string& field) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || (end && *end != '\0'))
        throw IoError("not a number: '" + field + "'");
    return v;
}

std::string format_double(double x) {
    char buf[40];
    // Prefer the short form when it round-trips, otherwise full precision.
    std::snprintf(buf, sizeof buf, "%.15g", x);
    if (std::strtod(buf, nullptr) != x) std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace ics::csv

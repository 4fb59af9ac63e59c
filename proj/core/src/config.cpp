#include "ics/config.hpp"

#include <fstream>
#include <sstream>

#include "ics/csv.hpp"
#include "ics/errors.hpp"

namespace ics {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw IoError("config line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw IoError("config line " + std::to_string(lineno) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        cfg.entries_[key] = value;
    }
    return cfg;
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : csv::to_double(it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    return static_cast<int>(std::stoll(it->second));
}

std::uint64_t Config::get_uint64(const std::string& key, std::uint64_t fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    return static_cast<std::uint64_t>(std::stoull(it->second));
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw IoError("config key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<std::string> Config::get_strings(const std::string& key) const {
    std::vector<std::string> out;
    auto it = entries_.find(key);
    if (it == entries_.end()) return out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : get_strings(key)) out.push_back(csv::to_double(s));
    return out;
}

std::vector<int> Config::get_ints(const std::string& key) const {
    std::vector<int> out;
    for (const auto& s : get_strings(key)) out.push_back(static_cast<int>(std::stoll(s)));
    return out;
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void Config::set_double(const std::string& key, double value) {
    entries_[key] = csv::format_double(value);
}

void Config::set_int(const std::string& key, long long value) {
    entries_[key] = std::to_string(value);
}

std::string Config::serialize() const {
    // Section-less keys first (they would otherwise be swallowed by the last
    // open section on re-parse), then sections in sorted order. std::map
    // ordering makes the output deterministic.
    std::ostringstream out;
    for (const auto& [key, value] : entries_)
        if (key.find('.') == std::string::npos) out << key << " = " << value << "\n";
    std::string current;
    for (const auto& [key, value] : entries_) {
        const auto dot = key.find('.');
        if (dot == std::string::npos) continue;
        const std::string section = key.substr(0, dot);
        if (section != current) {
            out << "[" << section << "]\n";
            current = section;
        }
        out << key.substr(dot + 1) << " = " << value << "\n";
    }
    return out.str();
}

} // namespace ics

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ics {

// Flat key-value configuration with optional [section] grouping. Keys are
// addressed as "section.key" ("key" alone for the implicit top section).
// '#' starts a comment; values keep internal whitespace. Serialization is
// deterministic (sorted keys) so configs round-trip losslessly and outputs
// can echo the exact settings that produced them.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const;

    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Comma-separated lists.
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<int> get_ints(const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    void set_double(const std::string& key, double value);
    void set_int(const std::string& key, long long value);

    std::string serialize() const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

} // namespace ics

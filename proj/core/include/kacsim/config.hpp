// Sectioned key/value experiment configuration: INI-style parsing, a single
// canonical serialization, and a content digest that is stable under key
// reordering and whitespace edits.
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace kacsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    // section -> key -> raw value (both trimmed)
    std::map<std::string, std::map<std::string, std::string>> sections;

    static Config parse_string(const std::string& text);
    static Config parse_file(const std::string& path);

    // Sorted sections and keys, "key = value" lines: the hashing form.
    std::string canonical() const;
    std::uint64_t hash() const;  // FNV-1a 64 of canonical()

    bool has(const std::string& section, const std::string& key) const;

    // Typed getters; errors name "section.key".
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    // comma-separated numeric lists
    std::vector<double> get_list(const std::string& section, const std::string& key) const;
};

}  // namespace kacsim

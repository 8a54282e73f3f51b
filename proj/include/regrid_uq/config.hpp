#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace regrid_uq {

// Flat `key = value` config with [section] headers. Sections may repeat
// ([covariate] blocks); entry order is preserved.
struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct ConfigSection {
    std::string name;
    int line = 0;
    std::vector<ConfigEntry> entries;

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int_or(const std::string& key, int fallback) const;
    std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;
    // Comma-separated ints; "a-b" tokens expand to inclusive ranges.
    std::vector<int> get_int_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;
};

struct Config {
    std::vector<ConfigSection> sections;
    std::string source;

    const ConfigSection* find(const std::string& name) const;
    const ConfigSection& require(const std::string& name) const;
    std::vector<const ConfigSection*> all(const std::string& name) const;
};

Config parse_config_text(const std::string& text, const std::string& source_name);
Config parse_config_file(const std::string& path);

}  // namespace regrid_uq

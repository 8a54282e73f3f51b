#include "regrid_uq/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "regrid_uq/errors.hpp"

namespace regrid_uq {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const ConfigEntry& e, const char* kind) {
    throw ValidationError("config: key '" + e.key + "' (line " + std::to_string(e.line) +
                          "): expected " + kind + ", got '" + e.value + "'");
}

const ConfigEntry* find_entry(const ConfigSection& s, const std::string& key) {
    for (const auto& e : s.entries) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

double to_double(const ConfigEntry& e) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc() || p != e.value.data() + e.value.size()) bad_value(e, "number");
    return v;
}

long long to_ll(const ConfigEntry& e) {
    long long v = 0;
    const auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc() || p != e.value.data() + e.value.size()) bad_value(e, "integer");
    return v;
}

}  // namespace

bool ConfigSection::has(const std::string& key) const { return find_entry(*this, key) != nullptr; }

const std::string& ConfigSection::get(const std::string& key) const {
    const auto* e = find_entry(*this, key);
    if (e == nullptr) {
        throw ValidationError("config: section [" + name + "] (line " + std::to_string(line) +
                              ") is missing key '" + key + "'");
    }
    return e->value;
}

std::string ConfigSection::get_or(const std::string& key, const std::string& fallback) const {
    const auto* e = find_entry(*this, key);
    return e != nullptr ? e->value : fallback;
}

double ConfigSection::get_double(const std::string& key) const {
    const auto* e = find_entry(*this, key);
    if (e == nullptr) {
        throw ValidationError("config: section [" + name + "] is missing key '" + key + "'");
    }
    return to_double(*e);
}

double ConfigSection::get_double_or(const std::string& key, double fallback) const {
    const auto* e = find_entry(*this, key);
    return e != nullptr ? to_double(*e) : fallback;
}

int ConfigSection::get_int(const std::string& key) const {
    const auto* e = find_entry(*this, key);
    if (e == nullptr) {
        throw ValidationError("config: section [" + name + "] is missing key '" + key + "'");
    }
    return static_cast<int>(to_ll(*e));
}

int ConfigSection::get_int_or(const std::string& key, int fallback) const {
    const auto* e = find_entry(*this, key);
    return e != nullptr ? static_cast<int>(to_ll(*e)) : fallback;
}

std::uint64_t ConfigSection::get_u64_or(const std::string& key, std::uint64_t fallback) const {
    const auto* e = find_entry(*this, key);
    if (e == nullptr) return fallback;
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
    if (ec != std::errc() || p != e->value.data() + e->value.size()) bad_value(*e, "unsigned integer");
    return v;
}

bool ConfigSection::get_bool_or(const std::string& key, bool fallback) const {
    const auto* e = find_entry(*this, key);
    if (e == nullptr) return fallback;
    if (e->value == "true" || e->value == "1" || e->value == "on") return true;
    if (e->value == "false" || e->value == "0" || e->value == "off") return false;
    bad_value(*e, "boolean");
}

std::vector<int> ConfigSection::get_int_list(const std::string& key) const {
    const auto* e = find_entry(*this, key);
    if (e == nullptr) {
        throw ValidationError("config: section [" + name + "] is missing key '" + key + "'");
    }
    std::vector<int> out;
    std::stringstream ss(e->value);
    std::string token;
    while (std::getline(ss, token, ',')) {
        token = trim(token);
        if (token.empty()) bad_value(*e, "integer list");
        const auto dash = token.find('-', 1);  // allow leading minus sign
        if (dash != std::string::npos) {
            int lo = 0, hi = 0;
            const auto a = token.substr(0, dash);
            const auto b = token.substr(dash + 1);
            auto r1 = std::from_chars(a.data(), a.data() + a.size(), lo);
            auto r2 = std::from_chars(b.data(), b.data() + b.size(), hi);
            if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != a.data() + a.size() ||
                r2.ptr != b.data() + b.size() || hi < lo) {
                bad_value(*e, "integer range");
            }
            for (int v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            int v = 0;
            const auto r = std::from_chars(token.data(), token.data() + token.size(), v);
            if (r.ec != std::errc() || r.ptr != token.data() + token.size()) {
                bad_value(*e, "integer list");
            }
            out.push_back(v);
        }
    }
    if (out.empty()) bad_value(*e, "nonempty integer list");
    return out;
}

std::vector<double> ConfigSection::get_double_list(const std::string& key) const {
    const auto* e = find_entry(*this, key);
    if (e == nullptr) {
        throw ValidationError("config: section [" + name + "] is missing key '" + key + "'");
    }
    std::vector<double> out;
    std::stringstream ss(e->value);
    std::string token;
    while (std::getline(ss, token, ',')) {
        token = trim(token);
        if (token.empty()) bad_value(*e, "number list");
        double v = 0.0;
        const auto r = std::from_chars(token.data(), token.data() + token.size(), v);
        if (r.ec != std::errc() || r.ptr != token.data() + token.size()) bad_value(*e, "number list");
        out.push_back(v);
    }
    return out;
}

const ConfigSection* Config::find(const std::string& name) const {
    for (const auto& s : sections) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

const ConfigSection& Config::require(const std::string& name) const {
    const auto* s = find(name);
    if (s == nullptr) throw ValidationError(source + ": missing section [" + name + "]");
    return *s;
}

std::vector<const ConfigSection*> Config::all(const std::string& name) const {
    std::vector<const ConfigSection*> out;
    for (const auto& s : sections) {
        if (s.name == name) out.push_back(&s);
    }
    return out;
}

Config parse_config_text(const std::string& text, const std::string& source_name) {
    Config cfg;
    cfg.source = source_name;
    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    ConfigSection* current = nullptr;
    while (std::getline(ss, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ValidationError(source_name + ": malformed section header at line " +
                                      std::to_string(line_no));
            }
            cfg.sections.push_back({trim(line.substr(1, line.size() - 2)), line_no, {}});
            current = &cfg.sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(source_name + ": expected 'key = value' at line " +
                                  std::to_string(line_no));
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ValidationError(source_name + ": empty key at line " + std::to_string(line_no));
        }
        if (current == nullptr) {
            throw ValidationError(source_name + ": key '" + key + "' at line " +
                                  std::to_string(line_no) + " appears before any [section]");
        }
        current->entries.push_back({key, trim(line.substr(eq + 1)), line_no});
    }
    return cfg;
}

Config parse_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open config: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), path);
}

}  // namespace regrid_uq

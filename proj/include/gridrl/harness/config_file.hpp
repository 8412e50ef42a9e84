#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridrl/errors.hpp"

namespace gridrl::harness {

/// Flat key-value configuration with [section] headers and '#' comments.
/// Keys are addressed as "section.key"; keys before any header live in the
/// "" section.
class ConfigFile {
public:
    ConfigFile() = default;
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    /// Serialized form with sections grouped; used for run provenance.
    std::string serialize() const;

private:
    // section -> ordered key/value pairs
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
};

/// "1,2,3" -> {1, 2, 3}; used for seed lists.
std::vector<std::uint64_t> parse_u64_list(const std::string& text);

}  // namespace gridrl::harness

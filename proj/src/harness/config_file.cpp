#include "gridrl/harness/config_file.hpp"

#include <fstream>
#include <sstream>

namespace gridrl::harness {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error("config line " + std::to_string(line_no) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            cfg.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(line_no) + ": expected key = value");
        cfg.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return get(section, key).has_value();
}

std::optional<std::string> ConfigFile::get(const std::string& section,
                                           const std::string& key) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return std::nullopt;
    for (const auto& [k, v] : it->second)
        if (k == key) return v;
    return std::nullopt;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    return get(section, key).value_or(fallback);
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    const auto v = get(section, key);
    if (!v) return fallback;
    try {
        return std::stod(*v);
    } catch (const std::exception&) {
        throw Error("config " + section + "." + key + ": not a number: '" + *v + "'");
    }
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    const auto v = get(section, key);
    if (!v) return fallback;
    try {
        return std::stoi(*v);
    } catch (const std::exception&) {
        throw Error("config " + section + "." + key + ": not an integer: '" + *v + "'");
    }
}

std::uint64_t ConfigFile::get_u64(const std::string& section, const std::string& key,
                                  std::uint64_t fallback) const {
    const auto v = get(section, key);
    if (!v) return fallback;
    try {
        return std::stoull(*v);
    } catch (const std::exception&) {
        throw Error("config " + section + "." + key + ": not an integer: '" + *v + "'");
    }
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
    const auto v = get(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw Error("config " + section + "." + key + ": not a boolean: '" + *v + "'");
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
    auto& entries = sections_[section];
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries.emplace_back(key, value);
}

std::string ConfigFile::serialize() const {
    std::ostringstream out;
    for (const auto& [section, entries] : sections_) {
        if (!section.empty()) out << '[' << section << "]\n";
        for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
    }
    return out.str();
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        const auto t = trim(token);
        if (t.empty()) continue;
        out.push_back(std::stoull(t));
    }
    if (out.empty()) throw Error("expected a comma-separated integer list, got '" + text + "'");
    return out;
}

}  // namespace gridrl::harness

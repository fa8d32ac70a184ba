#include "gadsel/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gadsel/errors.hpp"

namespace gadsel {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

IniFile IniFile::parse_string(const std::string& text,
                              const std::string& origin) {
    IniFile f;
    f.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": empty section name");
            if (!f.data_.count(section)) {
                f.data_[section] = {};
                f.section_order_.push_back(section);
            }
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": key outside any section");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": empty key");
        if (f.data_[section].count(key))
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
        f.data_[section][key] = value;
        f.key_order_[section].push_back(key);
    }
    return f;
}

bool IniFile::has_section(const std::string& name) const {
    return data_.count(name) > 0;
}

bool IniFile::has_key(const std::string& section,
                      const std::string& key) const {
    auto it = data_.find(section);
    return it != data_.end() && it->second.count(key) > 0;
}

std::vector<std::string> IniFile::section_names() const {
    return section_order_;
}

std::vector<std::string> IniFile::keys(const std::string& section) const {
    auto it = key_order_.find(section);
    return it == key_order_.end() ? std::vector<std::string>{} : it->second;
}

std::string IniFile::get(const std::string& section,
                         const std::string& key) const {
    auto it = data_.find(section);
    if (it == data_.end())
        throw ConfigError(origin_ + ": missing section [" + section + "]");
    auto kit = it->second.find(key);
    if (kit == it->second.end())
        throw ConfigError(origin_ + ": missing key '" + key + "' in [" +
                          section + "]");
    return kit->second;
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has_key(section, key) ? get(section, key) : fallback;
}

double IniFile::get_double(const std::string& section,
                           const std::string& key) const {
    std::string v = get(section, key);
    double out;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError(origin_ + ": [" + section + "] " + key +
                          ": not a number: '" + v + "'");
    return out;
}

double IniFile::get_double_or(const std::string& section,
                              const std::string& key, double fallback) const {
    return has_key(section, key) ? get_double(section, key) : fallback;
}

long long IniFile::get_int(const std::string& section,
                           const std::string& key) const {
    std::string v = get(section, key);
    long long out;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError(origin_ + ": [" + section + "] " + key +
                          ": not an integer: '" + v + "'");
    return out;
}

long long IniFile::get_int_or(const std::string& section,
                              const std::string& key,
                              long long fallback) const {
    return has_key(section, key) ? get_int(section, key) : fallback;
}

bool IniFile::get_bool_or(const std::string& section, const std::string& key,
                          bool fallback) const {
    if (!has_key(section, key)) return fallback;
    std::string v = get(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(origin_ + ": [" + section + "] " + key +
                      ": not a boolean: '" + v + "'");
}

std::vector<std::string> IniFile::get_string_list(
    const std::string& section, const std::string& key) const {
    std::string v = get(section, key);
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        auto comma = v.find(',', pos);
        auto end = comma == std::string::npos ? v.size() : comma;
        std::string item = trim(v.substr(pos, end - pos));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty())
        throw ConfigError(origin_ + ": [" + section + "] " + key +
                          ": empty list");
    return out;
}

std::vector<double> IniFile::get_double_list(const std::string& section,
                                             const std::string& key) const {
    auto items = get_string_list(section, key);
    std::vector<double> out;
    out.reserve(items.size());
    for (const auto& s : items) {
        double v;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw ConfigError(origin_ + ": [" + section + "] " + key +
                              ": not a number: '" + s + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace gadsel

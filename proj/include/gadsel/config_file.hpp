#pragma once

#include <map>
#include <string>
#include <vector>

namespace gadsel {

// Minimal declarative config format: [section] or [section.sub] headers,
// "key = value" lines, '#' comments. Values are scalars or comma lists.
class IniFile {
public:
    static IniFile parse_file(const std::string& path);
    static IniFile parse_string(const std::string& text,
                                const std::string& origin = "<string>");

    bool has_section(const std::string& name) const;
    bool has_key(const std::string& section, const std::string& key) const;

    std::vector<std::string> section_names() const;
    std::vector<std::string> keys(const std::string& section) const;

    // Throws ConfigError when the key is missing.
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;

    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    long long get_int(const std::string& section, const std::string& key) const;
    long long get_int_or(const std::string& section, const std::string& key,
                         long long fallback) const;
    bool get_bool_or(const std::string& section, const std::string& key,
                     bool fallback) const;

    std::vector<double> get_double_list(const std::string& section,
                                        const std::string& key) const;
    std::vector<std::string> get_string_list(const std::string& section,
                                             const std::string& key) const;

private:
    // section -> key -> value; insertion order kept for sections and keys.
    std::map<std::string, std::map<std::string, std::string>> data_;
    std::vector<std::string> section_order_;
    std::map<std::string, std::vector<std::string>> key_order_;
    std::string origin_;
};

}  // namespace gadsel

#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sbvsim/errors.hpp"

namespace sbvsim {

/// Sectioned key-value configuration. `[section]` headers or dotted keys
/// (`section.key = value`), `#`/`;` comments. Key lookup is tracked so the
/// loader can reject unknown keys afterwards (anti-typo contract).
class Config {
public:
    static Config parse(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        std::string section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string stripped = trim(line);
            if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
            if (stripped.front() == '[') {
                if (stripped.back() != ']') {
                    throw config_error("config line " + std::to_string(line_no) +
                                       ": unterminated section header");
                }
                section = trim(stripped.substr(1, stripped.size() - 2));
                continue;
            }
            const auto eq = stripped.find('=');
            if (eq == std::string::npos) {
                throw config_error("config line " + std::to_string(line_no) +
                                   ": expected key = value");
            }
            std::string key = trim(stripped.substr(0, eq));
            const std::string value = trim(stripped.substr(eq + 1));
            std::string sec = section;
            const auto dot = key.find('.');
            if (dot != std::string::npos) {
                sec = key.substr(0, dot);
                key = key.substr(dot + 1);
            }
            if (key.empty()) {
                throw config_error("config line " + std::to_string(line_no) + ": empty key");
            }
            cfg.values_[qualify(sec, key)] = value;
        }
        return cfg;
    }

    bool has(const std::string& section, const std::string& key) const {
        return values_.count(qualify(section, key)) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        const auto it = values_.find(qualify(section, key));
        if (it == values_.end()) return fallback;
        consumed_.insert(it->first);
        return it->second;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        const auto it = values_.find(qualify(section, key));
        if (it == values_.end()) return fallback;
        consumed_.insert(it->first);
        return to_double(it->second, it->first);
    }

    long get_int(const std::string& section, const std::string& key, long fallback) const {
        const auto it = values_.find(qualify(section, key));
        if (it == values_.end()) return fallback;
        consumed_.insert(it->first);
        return to_int(it->second, it->first);
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        const auto it = values_.find(qualify(section, key));
        if (it == values_.end()) return fallback;
        consumed_.insert(it->first);
        std::string v = it->second;
        std::transform(v.begin(), v.end(), v.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw config_error("config key '" + it->first + "': expected a boolean, got '" +
                           it->second + "'");
    }

    std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
        const auto it = values_.find(qualify(section, key));
        if (it == values_.end()) return fallback;
        consumed_.insert(it->first);
        std::vector<double> out;
        std::istringstream in(it->second);
        std::string item;
        while (std::getline(in, item, ',')) {
            const std::string t = trim(item);
            if (t.empty()) {
                throw config_error("config key '" + it->first + "': empty list element");
            }
            out.push_back(to_double(t, it->first));
        }
        if (out.empty()) {
            throw config_error("config key '" + it->first + "': empty list");
        }
        return out;
    }

    std::vector<int> get_int_list(const std::string& section, const std::string& key,
                                  const std::vector<int>& fallback) const {
        const auto doubles = get_double_list(section, key, {});
        if (doubles.empty()) return fallback;
        std::vector<int> out;
        for (double v : doubles) out.push_back(static_cast<int>(v));
        return out;
    }

    /// Throws on any key never read through a getter. With a section argument,
    /// only that section's keys are checked. Call after loading.
    void reject_unknown_keys(const std::string& section = std::string()) const {
        const std::string prefix = section.empty() ? std::string() : section + ".";
        for (const auto& [key, value] : values_) {
            if (!prefix.empty() && key.compare(0, prefix.size(), prefix) != 0) continue;
            if (consumed_.find(key) == consumed_.end()) {
                throw config_error("unknown config key '" + key + "'");
            }
        }
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }

    static std::string qualify(const std::string& section, const std::string& key) {
        return section.empty() ? key : section + "." + key;
    }

    static double to_double(const std::string& value, const std::string& key) {
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            return v;
        } catch (const std::exception&) {
            throw config_error("config key '" + key + "': expected a number, got '" + value + "'");
        }
    }

    static long to_int(const std::string& value, const std::string& key) {
        try {
            std::size_t used = 0;
            const long v = std::stol(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            return v;
        } catch (const std::exception&) {
            throw config_error("config key '" + key + "': expected an integer, got '" + value +
                               "'");
        }
    }

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

} // namespace sbvsim

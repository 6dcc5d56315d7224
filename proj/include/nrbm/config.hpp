#pragma once

// Flat key=value experiment configs.
//
// Format: one `key = value` per line, optional `[section]` headers that
// prefix the keys that follow ("[law]" + "kind = rademacher" yields the key
// "law.kind"), `#` comments, blank lines ignored.  No nesting.  Lists are
// comma-separated, with or without surrounding brackets.
//
// Readers mark the keys they consume; anything left over is an unknown key,
// which experiment runners treat as a usage error naming the offender.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nrbm {

class Config {
public:
    Config() = default;

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot open " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_string(buf.str(), path);
    }

    static Config parse_string(const std::string& text, const std::string& origin = "<string>") {
        Config cfg;
        std::string section;
        std::istringstream in(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string s = trim(strip_comment(line));
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": malformed section header");
                section = trim(s.substr(1, s.size() - 2));
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(s.substr(0, eq));
            const std::string value = trim(s.substr(eq + 1));
            if (key.empty())
                throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
            if (!section.empty()) key = section + "." + key;
            if (cfg.values_.count(key))
                throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": duplicate key " + key);
            cfg.values_[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw std::runtime_error("config: missing required key " + key);
        consumed_.insert(key);
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        return has(key) ? get_string(key) : fallback;
    }

    double get_double(const std::string& key) const { return to_double(key, get_string(key)); }
    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    std::uint64_t get_u64(const std::string& key) const {
        return to_u64(key, get_string(key));
    }
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? get_u64(key) : fallback;
    }

    std::vector<double> get_double_list(const std::string& key) const {
        std::vector<double> out;
        for (const std::string& item : split_list(get_string(key)))
            out.push_back(to_double(key, item));
        if (out.empty()) throw std::runtime_error("config: key " + key + " is an empty list");
        return out;
    }

    std::vector<std::uint64_t> get_u64_list(const std::string& key) const {
        std::vector<std::uint64_t> out;
        for (const std::string& item : split_list(get_string(key)))
            out.push_back(to_u64(key, item));
        if (out.empty()) throw std::runtime_error("config: key " + key + " is an empty list");
        return out;
    }

    /// Keys never consumed by any reader; non-empty means a usage error.
    std::vector<std::string> unknown_keys() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : values_)
            if (!consumed_.count(k)) out.push_back(k);
        return out;
    }

private:
    static std::string strip_comment(const std::string& s) {
        const auto pos = s.find('#');
        return pos == std::string::npos ? s : s.substr(0, pos);
    }

    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    static std::vector<std::string> split_list(std::string v) {
        v = trim(v);
        if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
        std::vector<std::string> out;
        std::istringstream in(v);
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    static std::uint64_t to_u64(const std::string& key, const std::string& v) {
        // stoull silently wraps negative input, so reject a sign up front
        if (v.empty() || v[0] == '-' || v[0] == '+')
            throw std::runtime_error("config: key " + key + " is not an unsigned integer: " + v);
        try {
            std::size_t pos = 0;
            const std::uint64_t out = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key " + key + " is not an unsigned integer: " + v);
        }
    }

    static double to_double(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const double out = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key " + key + " is not a number: " + v);
        }
    }

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

} // namespace nrbm

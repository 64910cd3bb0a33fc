#include "orgrad/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace orgrad {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.')
            return false;
    }
    return true;
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : raw) {
        if (c == ',') {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(trim(cur));
    if (parts.size() == 1 && parts[0].empty()) parts.clear();
    return parts;
}

}  // namespace

double parse_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" +
                                    raw + "'");
    return v;
}

std::int64_t parse_int(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
        throw std::invalid_argument("config key '" + key + "': expected an integer, got '" +
                                    raw + "'");
    return static_cast<std::int64_t>(v);
}

bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + raw +
                                "'");
}

void Config::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw std::invalid_argument("config: missing required key '" + key + "'");
    return it->second;
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    return parse_double(key, get_str(key));
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::int64_t Config::get_int(const std::string& key) const {
    return parse_int(key, get_str(key));
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key) const {
    return parse_bool(key, get_str(key));
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& p : split_list(get_str(key))) out.push_back(parse_double(key, p));
    if (out.empty())
        throw std::invalid_argument("config key '" + key + "': expected a non-empty list");
    return out;
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key) const {
    std::vector<std::int64_t> out;
    for (const std::string& p : split_list(get_str(key))) out.push_back(parse_int(key, p));
    if (out.empty())
        throw std::invalid_argument("config key '" + key + "': expected a non-empty list");
    return out;
}

Config ConfigFile::effective(
    const std::string& section,
    const std::vector<std::pair<std::string, std::string>>& overrides) const {
    Config out = globals;
    auto it = sections.find(section);
    if (it != sections.end())
        for (const auto& [k, v] : it->second.items()) out.set(k, v);
    for (const auto& [k, v] : overrides) out.set(k, v);
    return out;
}

ConfigFile parse_config_text(const std::string& text) {
    ConfigFile file;
    Config* target = &file.globals;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unterminated section header");
            const std::string name = trim(s.substr(1, s.size() - 2));
            if (!valid_key(name))
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": invalid section name");
            target = &file.sections[name];
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        const std::string key = trim(s.substr(0, eq));
        if (!valid_key(key))
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": invalid key '" + key + "'");
        target->set(key, trim(s.substr(eq + 1)));
    }
    return file;
}

ConfigFile parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace orgrad

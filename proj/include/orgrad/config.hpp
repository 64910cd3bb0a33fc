#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace orgrad {

// Flat key=value configuration with optional [section] blocks. Lookup order
// for an experiment: CLI overrides, then the experiment's section, then
// globals. Full-line comments start with '#'.
class Config {
public:
    void set(const std::string& key, const std::string& value);
    [[nodiscard]] bool has(const std::string& key) const;

    [[nodiscard]] std::string get_str(const std::string& key) const;
    [[nodiscard]] std::string get_str(const std::string& key,
                                      const std::string& fallback) const;
    [[nodiscard]] double get_double(const std::string& key) const;
    [[nodiscard]] double get_double(const std::string& key, double fallback) const;
    [[nodiscard]] std::int64_t get_int(const std::string& key) const;
    [[nodiscard]] std::int64_t get_int(const std::string& key,
                                       std::int64_t fallback) const;
    [[nodiscard]] bool get_bool(const std::string& key) const;
    [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
    [[nodiscard]] std::vector<double> get_double_list(const std::string& key) const;
    [[nodiscard]] std::vector<std::int64_t> get_int_list(const std::string& key) const;

    [[nodiscard]] const std::map<std::string, std::string>& items() const {
        return values_;
    }

private:
    std::map<std::string, std::string> values_;
};

struct ConfigFile {
    Config globals;
    std::map<std::string, Config> sections;

    // globals overlaid with the named section (absent section is fine), then
    // with the overrides, later layers winning per key.
    [[nodiscard]] Config effective(
        const std::string& section,
        const std::vector<std::pair<std::string, std::string>>& overrides = {}) const;
};

[[nodiscard]] ConfigFile parse_config_text(const std::string& text);
[[nodiscard]] ConfigFile parse_config_file(const std::string& path);

[[nodiscard]] double parse_double(const std::string& key, const std::string& raw);
[[nodiscard]] std::int64_t parse_int(const std::string& key, const std::string& raw);
[[nodiscard]] bool parse_bool(const std::string& key, const std::string& raw);

}  // namespace orgrad

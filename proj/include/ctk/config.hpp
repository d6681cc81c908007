#pragma once
#include <map>
#include <string>
#include <vector>

#include "ctk/grid.hpp"

namespace ctk {

// Flat key = value configuration. '#' starts a comment; blank lines ignored;
// keys are [a-z0-9_.]+. Every key must be consumed by the run: call
// check_consumed() after reading to reject unknown keys (ConfigError).
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Throws ConfigError naming any key never read.
    void check_consumed() const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    mutable std::map<std::string, bool> consumed_;
};

} // namespace ctk

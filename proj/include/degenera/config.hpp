#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace degenera {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_ = 0;
};

/// Flat structured text: one `key = value` per line, `#` comments, dotted keys
/// as nested tables.  Keys are unique; values are free text until end of line.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& def) const;
    double get_number(const std::string& key) const;
    double get_number_or(const std::string& key, double def) const;
    long long get_int(const std::string& key) const;
    long long get_int_or(const std::string& key, long long def) const;
    std::vector<double> get_list_or(const std::string& key,
                                    const std::vector<double>& def) const;
    std::vector<int> get_int_list_or(const std::string& key, const std::vector<int>& def) const;

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
    std::map<std::string, int> lines_;
    std::string origin_;

    int line_of(const std::string& key) const;
};

} // namespace degenera

#include "degenera/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace degenera {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_' && c != '-')
            return false;
    return true;
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string s = trim(line);
        if (s.empty()) continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ": expected `key = value`", lineno);
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (!valid_key(key))
            throw ConfigError(origin + ": bad key `" + key + "`", lineno);
        if (cfg.kv_.count(key))
            throw ConfigError(origin + ": duplicate key `" + key + "`", lineno);
        cfg.kv_[key] = value;
        cfg.lines_[key] = lineno;
    }
    return cfg;
}

int Config::line_of(const std::string& key) const {
    auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
}

std::string Config::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError(origin_ + ": missing key `" + key + "`");
    return it->second;
}

std::string Config::get_string_or(const std::string& key, const std::string& def) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
}

double Config::get_number(const std::string& key) const {
    std::string s = get_string(key);
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key `" + key + "` is not a number: `" + s + "`",
                          line_of(key));
    }
}

double Config::get_number_or(const std::string& key, double def) const {
    return has(key) ? get_number(key) : def;
}

long long Config::get_int(const std::string& key) const {
    double v = get_number(key);
    long long i = static_cast<long long>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError(origin_ + ": key `" + key + "` is not an integer", line_of(key));
    return i;
}

long long Config::get_int_or(const std::string& key, long long def) const {
    return has(key) ? get_int(key) : def;
}

std::vector<double> Config::get_list_or(const std::string& key,
                                        const std::vector<double>& def) const {
    if (!has(key)) return def;
    std::vector<double> out;
    std::string s = get_string(key);
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ": key `" + key + "` has a non-numeric entry `" + tok +
                                  "`",
                              line_of(key));
        }
    }
    return out;
}

std::vector<int> Config::get_int_list_or(const std::string& key,
                                         const std::vector<int>& def) const {
    if (!has(key)) return def;
    std::vector<int> out;
    for (double v : get_list_or(key, {})) out.push_back(static_cast<int>(v));
    return out;
}

} // namespace degenera

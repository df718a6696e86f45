#include "qawa/config.hpp"

#include <algorithm>
#include <fstream>

#include "qawa/error.hpp"

namespace qawa {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    Config c;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ValidationError(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
        c.kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return c;
}

std::string Config::get(const std::string& key, const std::string& dflt) const {
    const auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
}

std::string Config::require(const std::string& key) const {
    const auto it = kv.find(key);
    if (it == kv.end() || it->second.empty())
        throw ValidationError("config key '" + key + "' is required");
    return it->second;
}

double Config::get_double(const std::string& key, double dflt) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    try {
        size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "' is not a number: " + it->second);
    }
}

int64_t Config::get_int(const std::string& key, int64_t dflt) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    try {
        size_t pos = 0;
        const int64_t v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "' is not an integer: " + it->second);
    }
}

bool Config::get_bool(const std::string& key, bool dflt) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ValidationError("config key '" + key + "' is not a boolean: " + it->second);
}

}  // namespace qawa

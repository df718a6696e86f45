#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace qawa {

// Flat key=value configuration with dotted section prefixes
// (e.g. augment.keep=1). Every key can be overridden on the command line.
struct Config {
    std::map<std::string, std::string> kv;

    static Config load(const std::string& path);

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv[key] = value; }

    std::string get(const std::string& key, const std::string& dflt) const;
    std::string require(const std::string& key) const;
    double get_double(const std::string& key, double dflt) const;
    int64_t get_int(const std::string& key, int64_t dflt) const;
    bool get_bool(const std::string& key, bool dflt) const;
    uint64_t seed() const { return static_cast<uint64_t>(get_int("seed", 0)); }
    int jobs() const { return static_cast<int>(get_int("jobs", 1)); }
    std::string out_dir() const { return get("out", "out"); }
};

}  // namespace qawa

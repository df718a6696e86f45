#include "qawa/log.hpp"

#include <cstdlib>

namespace qawa::log {

namespace {

Level from_env() {
    const char* v = std::getenv("QAWA_LOG");
    if (!v) return Level::Warn;
    std::string s(v);
    if (s == "error") return Level::Error;
    if (s == "warn") return Level::Warn;
    if (s == "info") return Level::Info;
    if (s == "debug") return Level::Debug;
    return Level::Warn;
}

Level g_threshold = from_env();
std::mutex g_mutex;

const char* tag(Level lvl) {
    switch (lvl) {
        case Level::Error: return "error";
        case Level::Warn: return "warn";
        case Level::Info: return "info";
        default: return "debug";
    }
}

}  // namespace

Level threshold() { return g_threshold; }
void set_threshold(Level lvl) { g_threshold = lvl; }

namespace detail {

void emit(Level lvl, const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_mutex);
    std::cerr << "[qawa " << tag(lvl) << "] " << msg << "\n";
}

}  // namespace detail

}  // namespace qawa::log

#pragma once

#include <iostream>
#include <mutex>
#include <sstream>
#include <string>

namespace qawa::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Level comes from the QAWA_LOG environment variable; default warn.
Level threshold();
void set_threshold(Level lvl);

namespace detail {
void emit(Level lvl, const std::string& msg);
}

template <typename... Args>
void write(Level lvl, Args&&... args) {
    if (lvl > threshold()) return;
    std::ostringstream os;
    (os << ... << args);
    detail::emit(lvl, os.str());
}

template <typename... Args>
void error(Args&&... args) {
    write(Level::Error, std::forward<Args>(args)...);
}
template <typename... Args>
void warn(Args&&... args) {
    write(Level::Warn, std::forward<Args>(args)...);
}
template <typename... Args>
void info(Args&&... args) {
    write(Level::Info, std::forward<Args>(args)...);
}
template <typename... Args>
void debug(Args&&... args) {
    write(Level::Debug, std::forward<Args>(args)...);
}

}  // namespace qawa::log

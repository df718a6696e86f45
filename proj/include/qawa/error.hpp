#pragma once

#include <stdexcept>
#include <string>

namespace qawa {

// Error taxonomy mirrors the CLI exit codes: validation 1, data 2, engine 3.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration or unusable user input, detected before work starts.
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Malformed data encountered mid-run (corrupt files, broken records).
struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// External engine adapter failed (crash, timeout, protocol violation).
struct EngineError : Error {
    explicit EngineError(const std::string& msg) : Error(msg) {}
};

}  // namespace qawa

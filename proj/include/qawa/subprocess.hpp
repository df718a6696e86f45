#pragma once

#include <string>
#include <vector>

#include <sys/types.h>

namespace qawa {

// Child process speaking a newline-delimited request/response protocol over
// stdin/stdout. Reads are bounded by a timeout; a dead or silent child
// surfaces as EngineError.
class LineProcess {
public:
    explicit LineProcess(const std::vector<std::string>& argv);
    ~LineProcess();
    LineProcess(const LineProcess&) = delete;
    LineProcess& operator=(const LineProcess&) = delete;

    void write_line(const std::string& line);
    std::string read_line(int timeout_ms);
    const std::string& command() const { return command_; }

private:
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buf_;
    std::string command_;
};

}  // namespace qawa

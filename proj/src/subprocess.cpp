#include "qawa/subprocess.hpp"

#include <chrono>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "qawa/error.hpp"

namespace qawa {

LineProcess::LineProcess(const std::vector<std::string>& argv) {
    if (argv.empty()) throw ValidationError("engine command is empty");
    command_ = argv[0];

    int in_pipe[2];   // parent -> child
    int out_pipe[2];  // child -> parent
    if (pipe(in_pipe) != 0) throw EngineError("pipe: " + std::string(strerror(errno)));
    if (pipe(out_pipe) != 0) {
        close(in_pipe[0]);
        close(in_pipe[1]);
        throw EngineError("pipe: " + std::string(strerror(errno)));
    }

    pid_ = fork();
    if (pid_ < 0) {
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
        throw EngineError("fork: " + std::string(strerror(errno)));
    }
    if (pid_ == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    signal(SIGPIPE, SIG_IGN);
}

LineProcess::~LineProcess() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    if (pid_ > 0) {
        int status = 0;
        if (waitpid(pid_, &status, WNOHANG) == 0) {
            kill(pid_, SIGTERM);
            waitpid(pid_, &status, 0);
        }
    }
}

void LineProcess::write_line(const std::string& line) {
    std::string msg = line;
    msg.push_back('\n');
    size_t off = 0;
    while (off < msg.size()) {
        const ssize_t n = write(to_child_, msg.data() + off, msg.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw EngineError("engine '" + command_ + "' is not accepting input: " +
                              strerror(errno));
        }
        off += static_cast<size_t>(n);
    }
}

std::string LineProcess::read_line(int timeout_ms) {
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    for (;;) {
        const auto nl = buf_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buf_.substr(0, nl);
            buf_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                              deadline - std::chrono::steady_clock::now())
                              .count();
        if (left <= 0)
            throw EngineError("engine '" + command_ + "' timed out after " +
                              std::to_string(timeout_ms) + " ms");
        pollfd pfd{from_child_, POLLIN, 0};
        const int pr = poll(&pfd, 1, static_cast<int>(left));
        if (pr < 0) {
            if (errno == EINTR) continue;
            throw EngineError("poll: " + std::string(strerror(errno)));
        }
        if (pr == 0)
            throw EngineError("engine '" + command_ + "' timed out after " +
                              std::to_string(timeout_ms) + " ms");
        char chunk[4096];
        const ssize_t n = read(from_child_, chunk, sizeof(chunk));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw EngineError("read from engine '" + command_ + "': " + strerror(errno));
        }
        if (n == 0) {
            int status = 0;
            std::string detail = "engine '" + command_ + "' closed its output";
            if (pid_ > 0 && waitpid(pid_, &status, WNOHANG) == pid_) {
                pid_ = -1;
                if (WIFEXITED(status))
                    detail += " (exit status " + std::to_string(WEXITSTATUS(status)) + ")";
                else if (WIFSIGNALED(status))
                    detail += " (killed by signal " + std::to_string(WTERMSIG(status)) + ")";
            }
            throw EngineError(detail);
        }
        buf_.append(chunk, static_cast<size_t>(n));
    }
}

}  // namespace qawa

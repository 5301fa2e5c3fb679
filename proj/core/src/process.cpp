#include "ctxmine/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "ctxmine/errors.hpp"

namespace ctxmine {
namespace {

[[noreturn]] void child_exec(const std::vector<std::string>& argv, const std::string& working_dir) {
    if (!working_dir.empty() && chdir(working_dir.c_str()) != 0) {
        _exit(127);
    }
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
}

void write_all(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
        ssize_t n = ::write(fd, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            break;  // child may have exited without reading everything
        }
        off += static_cast<std::size_t>(n);
    }
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& working_dir,
                          const std::string& stdin_data) {
    if (argv.empty()) throw IoError("run_process: empty argv");
    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
        throw IoError("run_process: pipe() failed");
    }
    signal(SIGPIPE, SIG_IGN);
    pid_t pid = fork();
    if (pid < 0) throw IoError("run_process: fork() failed");
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) {
            ::close(fd);
        }
        child_exec(argv, working_dir);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);

    write_all(in_pipe[1], stdin_data);
    ::close(in_pipe[1]);

    ProcessResult result;
    struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    bool open_out = true, open_err = true;
    char buf[8192];
    while (open_out || open_err) {
        fds[0].fd = open_out ? out_pipe[0] : -1;
        fds[1].fd = open_err ? err_pipe[0] : -1;
        if (poll(fds, 2, -1) < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (open_out && (fds[0].revents & (POLLIN | POLLHUP))) {
            ssize_t n = ::read(out_pipe[0], buf, sizeof buf);
            if (n > 0) {
                result.out.append(buf, static_cast<std::size_t>(n));
            } else {
                open_out = false;
            }
        }
        if (open_err && (fds[1].revents & (POLLIN | POLLHUP))) {
            ssize_t n = ::read(err_pipe[0], buf, sizeof buf);
            if (n > 0) {
                result.err.append(buf, static_cast<std::size_t>(n));
            } else {
                open_err = false;
            }
        }
    }
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

LineProcess::LineProcess(const std::vector<std::string>& argv) {
    if (argv.empty()) throw IoError("LineProcess: empty argv");
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
        throw IoError("LineProcess: pipe() failed");
    }
    signal(SIGPIPE, SIG_IGN);
    pid_t pid = fork();
    if (pid < 0) throw IoError("LineProcess: fork() failed");
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
        child_exec(argv, {});
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

LineProcess::~LineProcess() { close(); }

void LineProcess::write_line(const std::string& line) {
    if (to_child_ < 0) throw IoError("LineProcess: child stdin closed");
    std::string data = line;
    data.push_back('\n');
    write_all(to_child_, data);
}

std::string LineProcess::read_line() {
    while (true) {
        auto pos = buffer_.find('\n');
        if (pos != std::string::npos) {
            std::string line = buffer_.substr(0, pos);
            buffer_.erase(0, pos + 1);
            return line;
        }
        char buf[8192];
        ssize_t n = ::read(from_child_, buf, sizeof buf);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw IoError("LineProcess: read failed");
        }
        if (n == 0) throw IoError("LineProcess: child closed pipe before replying");
        buffer_.append(buf, static_cast<std::size_t>(n));
    }
}

void LineProcess::close() {
    if (to_child_ >= 0) {
        ::close(to_child_);
        to_child_ = -1;
    }
    if (from_child_ >= 0) {
        ::close(from_child_);
        from_child_ = -1;
    }
    if (pid_ > 0) {
        int status = 0;
        while (waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
        }
        pid_ = -1;
    }
}

}  // namespace ctxmine

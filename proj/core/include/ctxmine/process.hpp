#pragma once

#include <string>
#include <vector>

namespace ctxmine {

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs argv[0] with the given arguments (no shell), optionally in a working
// directory, feeding stdin_data to the child. Captures stdout and stderr.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::string& working_dir = {},
                          const std::string& stdin_data = {});

// A long-lived child process spoken to one line at a time. Used for the
// external issue-ranker backend protocol.
class LineProcess {
public:
    explicit LineProcess(const std::vector<std::string>& argv);
    ~LineProcess();
    LineProcess(const LineProcess&) = delete;
    LineProcess& operator=(const LineProcess&) = delete;

    void write_line(const std::string& line);
    // Blocks until a full line arrives; throws IoError if the child closed
    // its end first.
    std::string read_line();
    void close();

private:
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

}  // namespace ctxmine

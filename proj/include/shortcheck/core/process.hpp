#pragma once

#include <string>
#include <vector>

namespace shortcheck {

struct ProcessResult {
    int exit_code = -1; // -1 when the child could not be started or was killed
    std::string stdout_text;
    std::string stderr_text;
};

// Runs argv[0] (PATH lookup) with the given arguments, capturing both streams.
ProcessResult run_process(const std::vector<std::string>& argv);

} // namespace shortcheck

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ifsdim/error.hpp"

namespace ifsdim {

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitConfig = 2,
    kExitGuard = 3,
    kExitSolver = 4,
    kExitRender = 5,
    kExitHypothesis = 6,
};

int exit_code_for(ErrorKind kind);

struct BundledExample {
    const char* section;
    const char* file;
    const char* summary;
    const char* command;  // subcommand that demonstrates it
    int expected_exit;
};

const std::vector<BundledExample>& bundled_examples();

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ifsdim

#include <iostream>
#include <string>
#include <vector>

#include "ifsdim/cli.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    return ifsdim::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "staged/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return staged::cli::run(args, std::cout, std::cerr);
}

#include <iostream>
#include <vector>

#include "acrlab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return acrlab::cli::run(args, std::cout, std::cerr);
}

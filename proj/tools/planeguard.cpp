#include <iostream>
#include <string>
#include <vector>

#include "planeguard/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return planeguard::cli::dispatch(args, std::cout, std::cerr);
}

#include <iostream>

#include "knzeta/cli.hpp"

int main(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return knzeta::run_cli(args, std::cout, std::cerr);
}

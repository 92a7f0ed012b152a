#include "pwref/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return pwref::cli::run(std::vector<std::string>(argv, argv + argc), std::cin, std::cout, std::cerr);
}

#include <iostream>

#include "omfloc/cli.hpp"

int main(int argc, char** argv) {
    return omfloc::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}

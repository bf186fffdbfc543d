#include <iostream>
#include <string>
#include <vector>

#include "iets/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return iets::runCliArgs(args, std::cout, std::cerr);
}

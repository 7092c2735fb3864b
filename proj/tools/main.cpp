#include <cbnt/cli.hpp>

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cbnt::run_cli(args, std::cout, std::cerr);
}

#include <iostream>

#include "reprtrace/cli.hpp"

int main(int argc, char** argv) {
    return reprtrace::cli::run_cli(argc, argv, std::cout, std::cerr);
}

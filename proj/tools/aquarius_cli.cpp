#include "aquarius/cli.hpp"

#include <iostream>

auto main(int argc, char** argv) -> int {
    return aquarius::cli::run_cli(argc, argv, std::cout, std::cerr);
}

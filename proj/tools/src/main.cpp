#include "fem_cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return fem::cli::run_cli(argc, argv, std::cout, std::cerr); }

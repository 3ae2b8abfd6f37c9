#include <iostream>

#include "volterra/cli.hpp"

int main(int argc, char** argv) { return volterra::cli::run_cli(argc, argv, std::cout, std::cerr); }

#include "expressive/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return expressive::cli::run_cli(argc, argv, std::cout, std::cerr); }

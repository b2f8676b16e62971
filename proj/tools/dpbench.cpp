#include <iostream>

#include "dpbench/cli.hpp"

int main(int argc, char** argv) { return dpbench::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "affordlab/cli/cli.hpp"

int main(int argc, char** argv) { return affordlab::cli::run(argc, argv, std::cout, std::cerr); }

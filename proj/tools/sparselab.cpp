#include <iostream>

#include "sparselab/cli/commands.hpp"

int main(int argc, char** argv) { return sparselab::cli::run(argc, argv, std::cout, std::cerr); }

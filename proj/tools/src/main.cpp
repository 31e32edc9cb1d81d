#include <iostream>

#include "fsde_cli/cli.hpp"

int main(int argc, char** argv) { return fsde::cli::run(argc, argv, std::cout, std::cerr); }

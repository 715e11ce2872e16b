#include <iostream>

#include "casimir/cli.hpp"

int main(int argc, char** argv) { return casimir::cli::run_main(argc, argv, std::cout, std::cerr); }

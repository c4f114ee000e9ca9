#include <iostream>

#include "mates/cli/commands.hpp"

int main(int argc, char** argv) { return mates::cli::run(argc, argv, std::cout, std::cerr); }

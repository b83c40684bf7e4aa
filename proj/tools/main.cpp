#include <iostream>

#include "isosim/cli.hpp"

int main(int argc, char** argv) { return isosim::cli::run(argc, argv, std::cout, std::cerr); }

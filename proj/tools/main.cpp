#include <iostream>

#include "hierindex/cli.hpp"

int main(int argc, char** argv) { return hierindex::cli::run(argc, argv, std::cout, std::cerr); }

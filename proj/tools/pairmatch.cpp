#include "pairmatch/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pairmatch::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "opreg/cli.hpp"

int main(int argc, char** argv) { return opreg::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "ressd/cli.hpp"

int main(int argc, char** argv) { return ressd::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "fixlab/cli.hpp"

int main(int argc, char **argv) { return fixlab::cli::run(argc, argv, std::cout, std::cerr); }

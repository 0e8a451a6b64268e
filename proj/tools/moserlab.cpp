#include <iostream>

#include "moserlab/cli.hpp"

int main(int argc, char** argv) { return moserlab::cli::run(argc, argv, std::cout, std::cerr); }

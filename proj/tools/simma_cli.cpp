#include <iostream>

#include "simma/cli.hpp"

int main(int argc, char** argv) { return simma::cli::run_command(argc, argv, std::cout, std::cerr); }

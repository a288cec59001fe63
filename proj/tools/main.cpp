#include <iostream>

#include "cmpslab/cli.hpp"

int main(int argc, char** argv) { return cmpslab::cli::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "cslsim/cli.hpp"

int main(int argc, char** argv) { return cslsim::run_cli(argc, argv, std::cout, std::cerr); }

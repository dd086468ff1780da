#include <iostream>

#include "a11y/cli.hpp"

int main(int argc, char** argv) { return a11y::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "momentwave/cli.hpp"

int main(int argc, char** argv) { return momentwave::run_cli(argc, argv, std::cout, std::cerr); }

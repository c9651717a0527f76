#include <iostream>

#include "gg/cli.hpp"

int main(int argc, char** argv) { return gg::run_cli(argc, argv, std::cout, std::cerr); }

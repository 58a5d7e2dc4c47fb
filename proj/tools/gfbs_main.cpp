#include <iostream>

#include "gfbs/cli.hpp"

int main(int argc, char** argv) { return gfbs::run_cli(argc, argv, std::cout, std::cerr); }

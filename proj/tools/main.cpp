#include <iostream>

#include "kqkp/cli.hpp"

int main(int argc, char** argv) { return kqkp::run_cli(argc, argv, std::cout, std::cerr); }

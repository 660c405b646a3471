#include <iostream>

#include "bhgs/cli.hpp"

int main(int argc, char** argv) { return bhgs::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "semeval/cli.hpp"

int main(int argc, char** argv) { return semeval::run_cli(argc, argv, std::cout, std::cerr); }

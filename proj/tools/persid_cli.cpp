#include <iostream>

#include "persid/cli.hpp"

int main(int argc, char** argv) { return persid::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "lshqs/commands.hpp"

int main(int argc, char** argv) { return lshqs::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "propest/commands.hpp"

int main(int argc, char** argv) { return propest::run_cli(argc, argv, std::cout, std::cerr); }

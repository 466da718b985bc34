#include "acts/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return acts::run_command(argc, argv, std::cout, std::cerr); }

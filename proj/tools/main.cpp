#include <iostream>

#include "qcopier/cli.hpp"

int main(int argc, char** argv) { return qcopier::run_cli(argc, argv, std::cout, std::cerr); }

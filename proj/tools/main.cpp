#include <iostream>

#include "cdscan/cli.hpp"

int main(int argc, char** argv) { return cdscan::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "ocsrbench/bench/cli.hpp"

int main(int argc, char** argv) { return ocsrbench::bench::cli_main(argc, argv, std::cout, std::cerr); }

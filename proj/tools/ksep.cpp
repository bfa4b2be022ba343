#include <iostream>

#include "ksep/cli.hpp"

int main(int argc, char** argv) { return ksep::cli::run(argc, argv, std::cout, std::cerr); }

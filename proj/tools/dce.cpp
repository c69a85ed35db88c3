#include <iostream>

#include "dce/cli.hpp"

int main(int argc, char** argv) { return dce::cli::main(argc, argv, std::cout, std::cerr); }

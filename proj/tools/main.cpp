#include "svrpl/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return svrpl::cli::main(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "cpc/cli.hpp"

int main(int argc, char** argv) { return cpc::cli::main(argc, argv, std::cout, std::cerr); }

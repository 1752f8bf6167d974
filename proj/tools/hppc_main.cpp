#include <iostream>

#include "hppc/cli.hpp"

int main(int argc, char** argv) { return hppc::cli::run(argc, argv, std::cout, std::cerr); }

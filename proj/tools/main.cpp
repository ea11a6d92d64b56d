#include <iostream>

#include "mheal/cli.hpp"

int main(int argc, char** argv) { return mheal::cli::run(argc, argv, std::cout, std::cerr); }

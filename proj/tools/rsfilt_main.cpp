#include "rsfilt/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return rsfilt::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return mscale::cli_entry(argc, argv, std::cout, std::cerr); }

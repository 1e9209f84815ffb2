#include <iostream>

#include "moran_cli/cli.hpp"

int main(int argc, char** argv) { return moran::cli::cli_main(argc, argv, std::cout, std::cerr); }

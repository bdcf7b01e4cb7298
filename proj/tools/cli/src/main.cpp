#include <iostream>

#include "proxyforge/cli/commands.hpp"

int main(int argc, char** argv) { return proxyforge::cli::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "szego_cli/app.hpp"

int main(int argc, char** argv) { return szego::cli::run_cli(argc, argv, std::cout, std::cerr); }

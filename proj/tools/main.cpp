// main.cpp — cbec command-line entry point
#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return cbec::cli::run(argc, argv, std::cout, std::cerr); }

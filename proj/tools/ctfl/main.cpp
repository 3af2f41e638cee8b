#include <iostream>

#include "ctfl/cli.hpp"

int main(int argc, char** argv) { return ctfl::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "relevance/cli.hpp"

int main(int argc, char** argv) { return relevance::run_cli(argc, argv, std::cout, std::cerr); }

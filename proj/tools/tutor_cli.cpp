#include "tutor/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tutor::run_cli(argc, argv, std::cin, std::cout, std::cerr); }

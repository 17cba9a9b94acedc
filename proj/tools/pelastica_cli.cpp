#include <iostream>

#include "pelastica/cli.hpp"

int main(int argc, char** argv) { return pelastica::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "yt8m/cli.hpp"

int main(int argc, char** argv) { return yt8m::cli_main(argc, argv, std::cout, std::cerr); }

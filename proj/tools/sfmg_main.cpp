#include <iostream>

#include "sfmg/app.hpp"

int main(int argc, char** argv) { return sfmg::run_cli(argc, argv, std::cout, std::cerr); }

#include "tatune/cli.hpp"

int main(int argc, char** argv) { return tatune::cli::run(argc, argv, std::cout, std::cerr); }

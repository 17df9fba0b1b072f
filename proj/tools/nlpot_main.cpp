#include <iostream>

#include "nlpot/cli/commands.hpp"

int main(int argc, char** argv) { return nlpot::cli::run(argc, argv, std::cout, std::cerr); }

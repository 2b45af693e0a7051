#include "gkflow_cli/app.hpp"

#include <iostream>

int main(int argc, char** argv) { return gkflow::cli::run(argc, argv, std::cout, std::cerr); }

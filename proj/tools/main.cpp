#include <cstdlib>
#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return axiograd::cli::run(argc, argv, std::cout, std::cerr, std::getenv("AXIOGRAD_SEED"));
}

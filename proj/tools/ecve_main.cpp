#include "ecve/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
  return ecve::cli::run(argc, argv, std::cout, std::cerr);
}

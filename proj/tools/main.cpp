#include <iostream>

#include "redistrict/cli.hpp"

int main(int argc, char** argv) {
  return redistrict::cli::run(argc, argv, std::cout, std::cerr);
}

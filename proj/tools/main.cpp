#include <iostream>

#include "vinstruct/cli.hpp"

int main(int argc, char** argv) {
  return vinstruct::cli::run(argc, argv, std::cout, std::cerr);
}

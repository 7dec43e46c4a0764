#include <iostream>

#include "nisto/cli_io.h"

int main(int argc, char** argv) {
  return nisto::run_cli(argc, argv, std::cout, std::cerr);
}

#include <iostream>

#include "optrrt/cli.hpp"

int main(int argc, char** argv) {
  return optrrt::cli::run_cli(argc, argv, std::cout, std::cerr);
}

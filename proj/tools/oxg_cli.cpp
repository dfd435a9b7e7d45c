#include <iostream>

#include "oxg/cli.hpp"

int main(int argc, char** argv) {
  return oxg::cli::run_cli(argc, argv, std::cout, std::cerr);
}

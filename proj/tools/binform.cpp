#include <iostream>

#include "binform/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return binform::run_cli(std::move(args), std::cout, std::cerr);
}

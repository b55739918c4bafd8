#include <iostream>
#include <string>
#include <vector>

#include "protoalg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return protoalg::run_cli(args, std::cout, std::cerr);
}

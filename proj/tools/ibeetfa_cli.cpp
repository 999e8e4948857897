#include <iostream>
#include <string>
#include <vector>

#include "ibeetfa/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ibeetfa::run_command(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "fspec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fspec::cliMain(args, std::cout, std::cerr);
}

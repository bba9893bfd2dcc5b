#include <iostream>
#include <vector>

#include "berkline/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return berkline::runCommand(args, std::cout, std::cerr);
}

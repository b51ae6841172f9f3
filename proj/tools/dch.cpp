#include <iostream>

#include "dch/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dch::run(args, std::cout, std::cerr);
}

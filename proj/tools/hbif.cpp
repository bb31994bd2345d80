#include <iostream>

#include "hessbif/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hessbif::cli::run(args, std::cout, std::cerr);
}

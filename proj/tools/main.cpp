#include "qdist/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qdist::cli::runCli(args, std::cout, std::cerr);
}

#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "ca/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  ca::cli::Options opts;
  opts.color = std::getenv("CA_NO_COLOR") == nullptr && isatty(STDOUT_FILENO);
  return ca::cli::run_cli(args, std::cout, std::cerr, opts);
}

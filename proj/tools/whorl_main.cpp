#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "whorl/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  const bool styled = ::isatty(STDOUT_FILENO) && std::getenv("NO_COLOR") == nullptr;
  return whorl::cli::run(args, std::cout, std::cerr, styled);
}

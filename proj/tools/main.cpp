#include <unistd.h>

#include <cstdlib>
#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  const char* no_color = std::getenv("NO_COLOR");
  bool color = ::isatty(STDOUT_FILENO) && !(no_color && *no_color);
  return narrex::cli::run(args, {std::cin, std::cout, std::cerr, color});
}

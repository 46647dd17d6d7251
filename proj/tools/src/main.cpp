#include <iostream>
#include <string>
#include <vector>

#include "mmdvar_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mmdvar::cli::run_cli(args, std::cout, std::cerr);
}

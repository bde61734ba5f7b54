#include <iostream>
#include <string>
#include <vector>

#include "csadapt_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return csadapt::cli::run(args, std::cout, std::cerr);
}

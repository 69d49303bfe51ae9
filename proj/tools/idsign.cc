#include <iostream>
#include <string>
#include <vector>

#include "idsign/cli/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return idsign::cli::RunCli(args, std::cout, std::cerr, std::cin);
}

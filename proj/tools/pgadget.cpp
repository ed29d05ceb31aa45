#include <iostream>
#include <string>
#include <vector>

#include "pgadget/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pgadget::run_cli(args, std::cout, std::cerr);
}

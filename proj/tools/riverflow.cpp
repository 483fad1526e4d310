#include <iostream>
#include <string>
#include <vector>

#include "riverflow/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return riverflow::cli::run(args, std::cout, std::cerr);
}

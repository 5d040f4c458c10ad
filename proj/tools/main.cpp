#include <iostream>

#include "optionhost/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return optionhost::run_cli(args, std::cout, std::cerr);
}

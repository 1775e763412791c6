#include <iostream>
#include <string>
#include <vector>

#include "evcs/app/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return evcs::app::cli_dispatch(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "gurarij/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gurarij::cli::dispatch(args, std::cout, std::cerr);
}

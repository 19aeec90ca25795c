#include <iostream>

#include "perimap/cli.hpp"

int main(int argc, char** argv) {
  return perimap::run_command({argv + 1, argv + argc}, std::cout, std::cerr);
}

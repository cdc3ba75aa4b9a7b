#include <iostream>

#include "dgplate/cli.hpp"

int main(int argc, char** argv) {
  return dgplate::cli_main(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}

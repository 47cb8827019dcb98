#include <iostream>

#include "qgames_cli.hpp"

int main(int argc, char** argv) {
  return qgames::cli::main_entry(argc, argv, std::cout, std::cerr);
}

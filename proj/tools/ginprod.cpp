#include <exception>
#include <iostream>

#include "ginprod/cli.hpp"

int main(int argc, char** argv) {
  try {
    return ginprod::cli::run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

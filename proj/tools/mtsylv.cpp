#include <iostream>

#include "mtsylv/cli.hpp"

int main(int argc, char** argv) {
  return mtsylv::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}

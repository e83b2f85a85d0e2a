#include <iostream>

#include "qzeno/app/cli.hpp"

int main(int argc, char** argv) {
  return qzeno::app::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "lgle/cli.hpp"

int main(int argc, char** argv) {
  return lgle::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

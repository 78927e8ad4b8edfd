#include <string>
#include <vector>

#include "sleuth/io.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sleuth::cli_main(args);
}

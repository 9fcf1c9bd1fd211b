#include <string>
#include <vector>

#include "edgeplan/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return edgeplan::cli::run_command(args);
}

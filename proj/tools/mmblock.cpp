#include "mmblock/cli.hpp"

int main(int argc, char** argv) {
  return mmblock::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}

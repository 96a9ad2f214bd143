#include <string>
#include <vector>

#include "run.hpp"

int main(int argc, char** argv) {
  return weaknoise::cli::main_entry(std::vector<std::string>(argv + 1, argv + argc));
}

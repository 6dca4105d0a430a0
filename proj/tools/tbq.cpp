#include "commands.hpp"

int main(int argc, char** argv) {
  return tbq::cli::run({argv + 1, argv + argc});
}

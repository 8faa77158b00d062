#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "lrghz/cli.hpp"

int main(int argc, char** argv) {
  lrghz::CliEnvironment env;
  if (const char* dir = std::getenv("LRGHZ_OUT_DIR"); dir && *dir) env.out_dir = dir;
  const std::vector<std::string> args(argv + 1, argv + argc);
  return lrghz::run_cli(args, std::cout, std::cerr, env);
}

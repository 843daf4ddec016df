#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  treedim::cli::RunConfig config;
  int code = 0;
  if (!treedim::cli::parse_args(argc, argv, config, code, std::cout, std::cerr)) return code;
  return treedim::cli::run(config, std::cout, std::cerr);
}

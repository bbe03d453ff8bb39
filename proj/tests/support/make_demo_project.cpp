// Populates a demo project directory for the CLI tests.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "demo_project.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_demo_project <dir>\n";
    return EXIT_FAILURE;
  }
  std::filesystem::remove_all(argv[1]);
  respdisp::testing::populate_demo_project(argv[1]);
  return EXIT_SUCCESS;
}

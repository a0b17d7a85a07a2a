#include "fracenv/cli/cli.hpp"

int main(int argc, char** argv) { return fracenv::cli::main(argc, argv); }

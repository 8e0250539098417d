#include "snowlens/cli/cli.hpp"

int main(int argc, char** argv) { return snowlens::cli::run(argc, argv); }

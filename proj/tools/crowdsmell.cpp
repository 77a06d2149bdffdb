#include "crowdsmell/cli/cli.hpp"

int main(int argc, char** argv) { return crowdsmell::cli::run(argc, argv); }

#include "hyperham/cli.hpp"

int main(int argc, char** argv) { return hyperham::cli::run_cli(argc, argv); }

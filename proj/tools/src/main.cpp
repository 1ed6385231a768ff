#include "avgnet_cli/cli.hpp"

int main(int argc, char** argv) { return avgnet::cli::RunCli(argc, argv); }

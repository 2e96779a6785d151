#include "cli.hpp"

int main(int argc, char** argv) { return dwcli::run_cli(argc, argv); }

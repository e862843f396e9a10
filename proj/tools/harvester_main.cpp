#include "harvester/cli.hpp"

int main(int argc, char** argv) { return harvester::run_cli(argc, argv); }

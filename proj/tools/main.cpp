#include "sigcore/cli.hpp"

int main(int argc, char** argv) { return sigcore::run_cli(argc, argv); }

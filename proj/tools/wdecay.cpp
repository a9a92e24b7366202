#include "wdecay/cli.hpp"

int main(int argc, char** argv) { return wdecay::run_cli(argc, argv); }

#include "cst/cli.hpp"

int main(int argc, char** argv) { return cst::run_cli(argc, argv); }

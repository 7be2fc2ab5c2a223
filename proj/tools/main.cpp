#include "tritz/cli.hpp"

int main(int argc, char** argv) { return tritz::run_cli(argc, argv); }

#include "cli.hpp"

int main(int argc, char** argv) { return varpoint::run_cli(argc, argv); }

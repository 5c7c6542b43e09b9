#include "stq/cli.hpp"

int main(int argc, char** argv) { return stq::run_cli(argc, argv); }

#include "rknav/cli.hpp"

int main(int argc, char** argv) { return rknav::run_cli(argc, argv); }

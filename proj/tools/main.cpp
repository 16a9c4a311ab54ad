#include "ktorus/cli.hpp"

int main(int argc, char** argv) { return ktorus::run_cli(argc, argv); }

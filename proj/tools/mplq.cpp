#include "mplq/cli.hpp"

int main(int argc, char** argv) { return mplq::run_cli(argc, argv); }

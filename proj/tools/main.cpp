#include "vagnn/cli.hpp"

int main(int argc, char** argv) { return vagnn::run_cli(argc, argv); }

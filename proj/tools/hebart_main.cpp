#include "hebart/cli.hpp"

int main(int argc, char** argv) { return hebart::run_cli(argc, argv); }

#include "namekit/cli.hpp"

int main(int argc, char** argv) { return namekit::run_cli(argc, argv); }

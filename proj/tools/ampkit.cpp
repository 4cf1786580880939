#include "ampkit/cli.hpp"

int main(int argc, char** argv) { return ampkit::run_cli(argc, argv); }

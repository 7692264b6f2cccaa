#include "intrarel/cli.h"

int main(int argc, char** argv) { return intrarel::run_cli(argc, argv); }

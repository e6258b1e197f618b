#include "paracurves/cli.hpp"

int main(int argc, char** argv) { return paracurves::cli::main(argc, argv); }

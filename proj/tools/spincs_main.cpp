#include "spincs/cli.hpp"

int main(int argc, char** argv) { return spincs::cli::main(argc, argv); }

#include "moreau/cli.hpp"

int main(int argc, char** argv) { return moreau::cli::main_entry(argc, argv); }

#include "cli/commands.h"

int main(int argc, char** argv) { return mcabrl::cli::run(argc, argv); }

#include "corrcam/commands.hpp"

int main(int argc, char** argv) { return corrcam::cli_main(argc, argv); }

#include "folint/cli.hpp"

int main(int argc, char** argv) { return folint::cli_main(argc, argv); }

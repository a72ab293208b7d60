#include "cryptosim/cli.hpp"

int main(int argc, char** argv) { return cryptosim::cli_main(argc, argv); }

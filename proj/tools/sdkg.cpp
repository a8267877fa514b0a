#include "sdkg/cli.hpp"

int main(int argc, char** argv) { return sdkg::cli_main(argc, argv); }

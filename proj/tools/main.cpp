#include "bala/cli.hpp"

int main(int argc, char** argv) { return bala::cli_main(argc, argv); }

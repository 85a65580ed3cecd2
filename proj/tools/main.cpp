#include "chirplet/cli.hpp"

int main(int argc, char** argv) { return chirplet::cli_main(argc, argv); }

#include "cli.hpp"

int main(int argc, char** argv) { return curvelab::cli_dispatch(argc, argv); }

#include "vident/cli.hpp"

int main(int argc, char** argv) { return vident::cli::run(argc, argv); }

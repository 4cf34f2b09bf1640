#include "mssd/cli.hpp"

int main(int argc, char** argv) { return mssd::cli::run(argc, argv); }

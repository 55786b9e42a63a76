#include "cli.hpp"

int main(int argc, char** argv) { return fcnscape::cli::run(argc, argv); }

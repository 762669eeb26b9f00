#include "liesys/cli.hpp"

int main(int argc, char** argv) { return liesys::cli::run(argc, argv); }

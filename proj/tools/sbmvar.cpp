#include "sbmvar/cli.hpp"

int main(int argc, char** argv) { return sbmvar::cli::run(argc, argv); }

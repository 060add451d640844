#include "qsn/cli.hpp"

int main(int argc, char** argv) { return qsn::cli_main(argc, argv); }

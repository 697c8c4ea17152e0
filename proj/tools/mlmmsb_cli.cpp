#include "mlmmsb/cli.hpp"

int main(int argc, char** argv) { return mlmmsb::cli_main(argc, argv); }

#include "pararenorm/cli.hpp"

int main(int argc, char** argv) { return pararenorm::cli::dispatch(argc, argv); }

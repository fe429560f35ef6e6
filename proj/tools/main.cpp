#include "cli.hpp"

int main(int argc, char** argv) { return skgibbs::cli::main_entry(argc, argv); }

#include "hqc/cli.hpp"

int main(int argc, char** argv) { return hqc::cli::main_entry(argc, argv); }

#include "cli.hpp"

int main(int argc, char** argv) { return mfe::cli::main_entry(argc, argv); }

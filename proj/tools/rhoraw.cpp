#include "rhoraw/cli.hpp"

int main(int argc, char** argv) { return rhoraw::cli::main_entry(argc, argv); }

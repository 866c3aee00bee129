#include "mixed_spectra_cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mixed_spectra::cli::main_entry(argc, argv, std::cout, std::cerr); }

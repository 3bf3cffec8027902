#include "embo/cli/app.hpp"

int main(int argc, char** argv) { return embo::cli::run_cli(argc, argv); }

#include "pricer.hpp"

int main(int argc, char** argv) { return qdp::cli::run_cli(argc, argv); }

#include "tailcv/cli.hpp"

int main(int argc, char** argv) { return tailcv::cli::run(argc, argv); }

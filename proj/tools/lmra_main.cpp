#include "lmra/bench.hpp"

int main(int argc, char** argv) { return lmra::bench::run_cli(argc, argv); }

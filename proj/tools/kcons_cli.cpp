#include <kcons/cli.hpp>

int main(int argc, char** argv) { return kcons::cli::run(argc, argv); }

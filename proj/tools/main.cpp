#include "adoptnet/harness.hpp"

int main(int argc, char** argv) { return adoptnet::cli::run(argc, argv); }

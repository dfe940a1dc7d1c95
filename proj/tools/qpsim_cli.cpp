#include "qpsim/runner.hpp"

int main(int argc, char** argv) { return qpsim::run_command(argc, argv); }

#include "commands.hpp"

int main(int argc, char** argv) { return kvflow::run_cli(argc, argv); }

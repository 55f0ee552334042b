#include "langgeo/cli.hpp"

int main(int argc, char** argv) { return langgeo::run_cli(argc, argv); }

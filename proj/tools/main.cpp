#include "commands.hpp"

int main(int argc, char** argv) { return xray::cli::run(argc, argv); }

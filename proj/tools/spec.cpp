#include "commands.hpp"

int main(int argc, char** argv) { return spec::run(argc, argv); }

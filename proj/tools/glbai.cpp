#include "glbai/experiment.hpp"

int main(int argc, char** argv) { return glbai::cli_main(argc, argv); }

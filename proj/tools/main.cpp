#include "hdmean/cli.hpp"

int main(int argc, char** argv) { return hdmean::cli::run(argc, argv); }

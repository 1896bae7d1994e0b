#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
    using namespace logschro::cli;
    RunConfig cfg;
    try {
        cfg = parse_config(argc, argv, std::cout);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\nrun with --help for the command list\n";
        return 2;
    }
    if (cfg.command.empty()) return 0;  // --help or --version
    return run(cfg, std::cout, std::cerr);
}

#include "harbor/cli/commands.hpp"

int main(int argc, char** argv) {
    return harbor::cli::run_cli(argc, argv);
}

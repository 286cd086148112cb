#ifndef HARBOR_CLI_COMMANDS_HPP
#define HARBOR_CLI_COMMANDS_HPP

namespace harbor::cli {

/// Parses argv, dispatches the subcommand, maps exceptions to exit codes:
/// 0 ok, 2 config error, 3 data error, 4 numerical failure.
int run_cli(int argc, char** argv);

} // namespace harbor::cli

#endif

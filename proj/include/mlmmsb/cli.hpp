#ifndef MLMMSB_CLI_HPP
#define MLMMSB_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mlmmsb {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Runs the command-line tool. args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

/// Resolves a `--data` argument: an existing file path, or one of the
/// aliases lazega, celegans, cs-aarhus, fao-trade searched for under
/// data_dir. Returns nullopt when nothing matches.
std::optional<std::filesystem::path> resolve_dataset(const std::string& name, const std::filesystem::path& data_dir);

}  // namespace mlmmsb

#endif  // MLMMSB_CLI_HPP

#ifndef IDSIGN_CLI_CLI_H_
#define IDSIGN_CLI_CLI_H_

#include <iostream>
#include <string>
#include <vector>

namespace idsign::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;        // bad arguments, I/O, bad input
inline constexpr int kExitNoSignature = 2;  // verify: no signature present
inline constexpr int kExitInvalid = 3;      // verify: signature not intact
inline constexpr int kExitRemote = 4;       // session or server failure

// Runs one `idsign` invocation. |args| excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err, std::istream& in = std::cin);

}  // namespace idsign::cli

#endif  // IDSIGN_CLI_CLI_H_

#pragma once

// The command-line driver behind the `randers` executable.
//
//   simulate   distances.csv (+ symmetric.csv, beta_integrals.csv, profile.csv by pipeline stage)
//   decompose  symmetric.csv and beta_integrals.csv from --data or a simulated config
//   recover    report.txt and attachments for two configs
//   verify     verify.txt: norm axioms, reversal, projective equivalence, gauge invariance, conservation
//   plotdata   paths.csv and profile.csv
//
// Exit status: 0 success, 1 usage or input error, 2 hypothesis violated,
// 3 numerical failure, 4 internal error (including a property failing while
// its hypotheses hold).

#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace randers {

enum ExitStatus : int { exit_ok = 0, exit_usage = 1, exit_hypothesis = 2, exit_numerical = 3, exit_internal = 4 };

struct CommandLine {
    std::string command;
    std::vector<std::string> configs;
    std::vector<std::string> data;
    std::string out = ".";
    std::optional<std::uint64_t> seed = std::nullopt;
    std::optional<int> threads = std::nullopt;
};

// Runs one command. Progress goes to `out`; failures are reported on `err`
// as a JSON object {"error": {...}} and mapped to an exit status.
int run_command(const CommandLine& cmd, std::ostream& out, std::ostream& err);

// Exit status for an exception escaping a command.
int exit_status_for(const std::exception& e);

}  // namespace randers

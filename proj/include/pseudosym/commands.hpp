#pragma once

// Subcommands of the command-line tool. Each command validates its config,
// computes, and returns the CSV body plus a human-readable summary; nothing is
// written until the computation has succeeded.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pseudosym/io.hpp"

namespace pseudosym {

struct CommandResult {
    std::string csv;
    std::string summary;
    bool ok = true;  // false: the command ran but a check it performs failed
};

inline constexpr double kDriftStep = 0.25;
inline constexpr std::size_t kDriftStepsCi = 300'000;
inline constexpr std::size_t kDriftStepsFull = 3'000'000;

CommandResult cmd_trajectory(const RunConfig& cfg);
CommandResult cmd_defect_sweep(const RunConfig& cfg);
CommandResult cmd_jtilde(const RunConfig& cfg);
CommandResult cmd_energy_drift(const RunConfig& cfg);
CommandResult cmd_optimality(const RunConfig& cfg);
CommandResult cmd_sv_orders(const RunConfig& cfg);
CommandResult cmd_volume(const RunConfig& cfg);
CommandResult cmd_selftest(const RunConfig& cfg);

const std::vector<std::string_view>& command_names();

/// Runs a command, writes its CSV to cfg.out (or `out`) and the summary to
/// `err`. Returns 0 on success, 1 on computational failure, 2 on a config
/// error.
int run_command(std::string_view name, const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace pseudosym

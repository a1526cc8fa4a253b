#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cadence/error.hpp"
#include "cli/config.hpp"

namespace cadence::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitData = 2, kExitTraining = 3 };

int exit_code_for(ErrorCode code) noexcept;

/// UTC, second resolution: 2024-05-01T12:00:00Z
std::string iso8601_now();

class Progress {
 public:
  explicit Progress(std::ostream& out) : out_(out) {}
  void operator()(const std::string& message) const;

 private:
  std::ostream& out_;
};

// Each command assumes the effective config has already been echoed.
void cmd_train(const RunConfig& config, const Progress& progress);
void cmd_score(const RunConfig& config, const Progress& progress);
void cmd_detect(const RunConfig& config, const Progress& progress);
void cmd_eval(const RunConfig& config, const Progress& progress);
void cmd_ablate(const RunConfig& config, const Progress& progress);
void cmd_synth(const RunConfig& config, const Progress& progress);

/// Full entry point: parses `args` (without the program name), resolves the
/// config, echoes it, dispatches, and maps failures to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cadence::cli

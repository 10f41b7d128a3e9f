#pragma once
// Experiment commands and bit-exact result emission.

#include <ostream>
#include <string>

#include "semcom/config.hpp"
#include "semcom/simulator.hpp"

namespace semcom {

inline constexpr std::string_view kArtifactVersion = "1.0.0";

// Exit codes used by the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;
inline constexpr int kExitValidationFailure = 4;

// Six significant digits, '.' decimal separator.
std::string format_sig6(double v);

// Writes steps.csv, rewards_series.csv, summary.csv, corpus.csv, and
// run_manifest.txt into out_dir. Returns kExitOk.
int cmd_run(const SimConfig& config, const std::string& out_dir,
            std::ostream& log);

// Writes overhead.csv and run_manifest.txt into out_dir.
int cmd_sweep(const SimConfig& config, const std::string& out_dir,
              std::ostream& log);

// Fast invariant suite; one verdict line per check. Returns kExitOk when all
// checks pass, kExitValidationFailure otherwise. When checkpoint_path is
// nonempty the checkpoint check validates that file instead of a self-written
// round trip.
int cmd_validate(const std::string& checkpoint_path, std::ostream& log);

}  // namespace semcom

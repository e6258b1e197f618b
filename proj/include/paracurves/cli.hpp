#pragma once

// Batch front-end: one JSON scenario config in, one JSON report (plus CSV for integrate) out.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace paracurves::cli {

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kConfigError = 2, kNumericalBreakdown = 3 };

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::optional<std::uint64_t> seed;  ///< overrides the config's "seed"
  std::optional<double> tol;          ///< overrides the config's "tol"
  std::string out_dir;                ///< reports and CSV files go here when non-empty
  std::string base_dir;               ///< relative fixture and metric paths resolve against this
};

struct Outcome {
  int exit_code = kPass;
  std::string report;  ///< pretty-printed JSON with sorted keys, newline-terminated
  std::string id;
};

/// Run "symalg", "integrate", "check" or "suite" on the config text. Never throws: schema and
/// precondition problems become exit code 2, numerical breakdown 3, failed checks 1.
Outcome run(std::string_view command, const std::string& config_text, const RunOptions& opt = {});

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Entry point of the command-line tool.
int main(int argc, char** argv);

}  // namespace paracurves::cli

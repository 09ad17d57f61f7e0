#pragma once

// Whole run from a configuration file to the output directory, as driven
// by the command-line tool.

#include "seer/cli/config.hpp"
#include "seer/cli/report.hpp"
#include "seer/cli/run.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace seer::cli {

struct RunRequest {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<Algorithm> algorithm;
    OutputOptions outputs;
};

/// --out, else $SEER_OUT_DIR, else [model] output (relative to the
/// configuration file), else "seer_out" next to the configuration file.
std::string resolve_output_dir(const RunConfig& cfg, const std::optional<std::string>& flag);

struct RunOutcome {
    std::string output_dir;
    RunConfig config;
    PreparedModel prepared;
    FitResult fit;
};

RunOutcome execute(const RunRequest& req);

/// Short human summary of a finished run (criterion, convergence, R2 table).
void print_summary(std::ostream& out, const RunOutcome& outcome);

/// Prints the summary and R2 table stored in an output directory.
void print_report(std::ostream& out, const std::string& dir);

} // namespace seer::cli

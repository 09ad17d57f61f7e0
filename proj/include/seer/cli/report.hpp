#pragma once

// Output files of a run. Human-readable tables use three decimals; the
// machine files (scores.tsv, loadings.tsv, summary.tsv, regression.tsv)
// use 17 significant digits so that reloading reproduces the run.

#include "seer/cli/config.hpp"
#include "seer/cli/ingest.hpp"
#include "seer/cli/run.hpp"

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace seer::cli {

/// A correlation plane between components j and k (1-based) of one group;
/// the group may be the dependent one, and a predictor group may also be
/// given by its 1-based index.
struct PlaneRequest {
    std::string group;
    int first = 1;
    int second = 2;
};

/// Parses "group:j,k". Throws ConfigError on bad syntax.
PlaneRequest parse_plane(const std::string& spec);

struct OutputOptions {
    std::vector<PlaneRequest> planes;
    /// Planes show every model variable instead of the group's own.
    bool all_variables = false;
};

/// Three decimals, no negative zero.
std::string fixed3(double v);
/// 17 significant digits.
std::string exact(double v);

/// Writes every output file into `dir` (created if needed). Throws
/// UnknownComponent for a plane naming a missing group or rank.
void write_outputs(const std::string& dir, const RunConfig& cfg, const PreparedModel& pm, const FitResult& fit,
                   const OutputOptions& opts);

void write_components(std::ostream& out, const PreparedModel& pm, const FitResult& fit);
void write_r2_table(std::ostream& out, const PreparedModel& pm, const FitResult& fit);
void write_convergence(std::ostream& out, const FitResult& fit);
void write_plane(std::ostream& out, const PreparedModel& pm, const FitResult& fit, const PlaneRequest& req,
                 bool all_variables);

struct ScoreTable {
    std::vector<std::string> ids;
    /// Column labels "group^rank".
    std::vector<std::string> columns;
    MatrixXd values;
};

struct LoadingRow {
    std::string group;
    int rank = 0;
    std::string variable;
    double loading = 0.0;
};

ScoreTable read_scores(const std::string& path);
std::vector<LoadingRow> read_loadings(const std::string& path);
std::map<std::string, std::string> read_summary(const std::string& path);

} // namespace seer::cli

#pragma once

// Run configuration read from an INI file:
//
//   [dataset]   path, weights, id_column
//   [model]     dependent, algorithm, dependent_components, omega, seed,
//               output, pls2_nesting, score_threshold
//   [options]   component_tol, inner_tol, max_outer, max_inner, init,
//               init_column, safeguard
//   [group G]   variables, metric, blocks, components, min_components
//
// Group sections keep their file order; the one named by model.dependent is
// the dependent block, the others are predictor groups.

#include "seer/linalg.hpp"
#include "seer/pls.hpp"
#include "seer/seer.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace seer::cli {

enum class Algorithm { pls1, ln_pls2, seer_a3, seer_b2, select };
const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct GroupSpec {
    std::string name;
    std::vector<std::string> variables;
    MetricKind metric = MetricKind::identity;
    /// block_inverse partition, by variable name.
    std::vector<std::vector<std::string>> blocks;
    Index components = 1;
    Index min_components = 0;
};

struct RunConfig {
    /// Directory relative paths in the file are resolved against.
    std::string base_dir = ".";
    std::string dataset_path;
    std::string weights_column;
    std::string id_column;

    GroupSpec dependent;
    std::vector<GroupSpec> predictors;

    Algorithm algorithm = Algorithm::seer_a3;
    Index dependent_components = 0;
    OmegaKind omega = OmegaKind::inv_lambda1;
    std::optional<std::uint64_t> seed;
    std::string output;
    Pls2Nesting nesting = Pls2Nesting::conditioned;
    std::optional<double> score_threshold;
    ConvergenceOptions options;

    /// dataset_path resolved against base_dir.
    std::string resolved_dataset() const;
};

/// Throws ConfigError on syntax errors, unknown sections or keys, bad
/// values, a missing dependent group or a variable listed twice.
RunConfig parse_config(std::istream& in, const std::string& base_dir = ".",
                       const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

} // namespace seer::cli

#pragma once

// Dispatches a prepared model to the configured algorithm and gathers the
// result in one shape, whatever the algorithm.

#include "seer/cli/config.hpp"
#include "seer/cli/ingest.hpp"
#include "seer/seer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace seer::cli {

struct FitResult {
    Algorithm algorithm = Algorithm::seer_a3;
    /// Predictor groups as fitted. The single-group methods fit one group
    /// made of every predictor variable, with a block-diagonal metric.
    std::vector<Block> predictors;
    std::vector<std::vector<std::string>> predictor_variables;
    ModelComponents components;
    std::optional<SelectionResult> selection;
};

/// Name of the merged group used by pls1 and ln_pls2.
std::string merged_group_name(const PreparedModel& pm);

FitResult run_algorithm(const RunConfig& cfg, const PreparedModel& pm);

} // namespace seer::cli

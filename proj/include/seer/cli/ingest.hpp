#pragma once

// Turns a parsed CSV table and a run configuration into a standardized
// thematic model.

#include "seer/cli/config.hpp"
#include "seer/cli/csv.hpp"
#include "seer/seer.hpp"

#include <string>
#include <vector>

namespace seer::cli {

struct PreparedModel {
    ThematicModel model;
    /// Observation identifiers, in row order.
    std::vector<std::string> ids;
    /// Variable names of the dependent group and of each predictor group.
    std::vector<std::string> dependent_variables;
    std::vector<std::vector<std::string>> predictor_variables;
    std::vector<Index> min_counts;
};

/// Identifier column: the configured one, else the first column when it
/// holds a non-numeric cell and is not a model variable, else none (-1).
long id_column(const RunConfig& cfg, const CsvTable& table);

/// Throws MissingVariable, NonNumericCell, InvalidWeights, ConstantColumn
/// (naming the variable) or ConfigError.
PreparedModel prepare_model(const RunConfig& cfg, const CsvTable& table);

} // namespace seer::cli

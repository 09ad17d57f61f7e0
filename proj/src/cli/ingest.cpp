#include "seer/cli/ingest.hpp"

#include "seer/errors.hpp"

#include <algorithm>

namespace seer::cli {

namespace {

MatrixXd numeric_columns(const CsvTable& t, const std::vector<std::string>& names, const std::string& group) {
    MatrixXd x(static_cast<Index>(t.rows.size()), static_cast<Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        const long c = t.column(names[j]);
        if (c < 0) throw MissingVariable("variable '" + names[j] + "' (group " + group + ") is not in the dataset");
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            double v = 0.0;
            if (!parse_number(t.rows[i][c], v))
                throw NonNumericCell("row " + std::to_string(i + 1) + ", column '" + names[j] + "': '" +
                                     t.rows[i][c] + "'");
            x(static_cast<Index>(i), static_cast<Index>(j)) = v;
        }
    }
    return x;
}

Block make_block(const GroupSpec& g, const CsvTable& t, const Weights& w) {
    const MatrixXd raw = numeric_columns(t, g.variables, g.name);
    WeightedDataset ds = [&] {
        try {
            return standardize(raw, w, ScaleMode::center_scale, g.variables);
        } catch (const ConstantColumn& e) {
            throw ConstantColumn("group " + g.name + ": " + e.what());
        }
    }();
    Blocks blocks;
    for (const auto& b : g.blocks) {
        std::vector<Index> cols;
        for (const auto& v : b) {
            const auto it = std::find(g.variables.begin(), g.variables.end(), v);
            cols.push_back(static_cast<Index>(it - g.variables.begin()));
        }
        blocks.push_back(std::move(cols));
    }
    try {
        return Block{g.name, ds.x, make_metric(g.metric, ds, blocks)};
    } catch (const std::invalid_argument& e) {
        throw ConfigError("group " + g.name + ": " + e.what());
    } catch (const Error& e) {
        throw Error(e.kind(), "group " + g.name + " metric: " + std::string(e.what()));
    }
}

} // namespace

long id_column(const RunConfig& cfg, const CsvTable& table) {
    if (!cfg.id_column.empty()) {
        const long c = table.column(cfg.id_column);
        if (c < 0) throw MissingVariable("id column '" + cfg.id_column + "' is not in the dataset");
        return c;
    }
    if (table.header.empty()) return -1;
    const std::string& first = table.header.front();
    auto used = [&](const GroupSpec& g) {
        return std::find(g.variables.begin(), g.variables.end(), first) != g.variables.end();
    };
    if (used(cfg.dependent) || first == cfg.weights_column) return -1;
    for (const auto& g : cfg.predictors)
        if (used(g)) return -1;
    for (const auto& row : table.rows) {
        double v = 0.0;
        if (!parse_number(row.front(), v)) return 0;
    }
    return -1;
}

PreparedModel prepare_model(const RunConfig& cfg, const CsvTable& table) {
    const Index n = static_cast<Index>(table.rows.size());
    if (n < 2) throw ConfigError("dataset has fewer than two observations");

    VectorXd p = VectorXd::Ones(n);
    if (!cfg.weights_column.empty()) {
        const long c = table.column(cfg.weights_column);
        if (c < 0) throw MissingVariable("weights column '" + cfg.weights_column + "' is not in the dataset");
        for (Index i = 0; i < n; ++i) {
            double v = 0.0;
            if (!parse_number(table.rows[i][c], v))
                throw NonNumericCell("row " + std::to_string(i + 1) + ", column '" + cfg.weights_column + "': '" +
                                     table.rows[i][c] + "'");
            if (!(v > 0.0))
                throw InvalidWeights("row " + std::to_string(i + 1) + ": weight " + table.rows[i][c] +
                                     " is not positive");
            p(i) = v;
        }
    }
    Weights w(p);

    PreparedModel out{
        ThematicModel{make_block(cfg.dependent, table, w), {}, {}, cfg.dependent_components, w, cfg.options},
        {}, cfg.dependent.variables, {}, {}};
    for (const auto& g : cfg.predictors) {
        out.model.predictors.push_back(make_block(g, table, w));
        out.model.counts.push_back(g.components);
        out.predictor_variables.push_back(g.variables);
        out.min_counts.push_back(g.min_components);
    }

    const long idc = id_column(cfg, table);
    for (Index i = 0; i < n; ++i)
        out.ids.push_back(idc >= 0 ? table.rows[i][idc] : std::to_string(i + 1));

    try {
        out.model.validate();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return out;
}

} // namespace seer::cli

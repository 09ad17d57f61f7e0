#include "seer/cli/run.hpp"

#include "seer/criteria.hpp"
#include "seer/errors.hpp"
#include "seer/pls.hpp"

namespace seer::cli {

std::string merged_group_name(const PreparedModel& pm) {
    std::string name;
    for (const auto& b : pm.model.predictors) name += (name.empty() ? "" : "+") + b.name;
    return name;
}

namespace {

Block merge_predictors(const PreparedModel& pm, std::vector<std::string>& vars) {
    Index cols = 0;
    for (const auto& b : pm.model.predictors) cols += b.x.cols();
    MatrixXd x(pm.model.weights.size(), cols);
    MatrixXd m = MatrixXd::Zero(cols, cols);
    Index at = 0;
    for (std::size_t r = 0; r < pm.model.predictors.size(); ++r) {
        const auto& b = pm.model.predictors[r];
        x.middleCols(at, b.x.cols()) = b.x;
        m.block(at, at, b.x.cols(), b.x.cols()) = b.metric.matrix();
        at += b.x.cols();
        vars.insert(vars.end(), pm.predictor_variables[r].begin(), pm.predictor_variables[r].end());
    }
    const MetricKind kind = pm.model.predictors.size() == 1 ? pm.model.predictors.front().metric.kind()
                                                             : MetricKind::custom;
    return Block{merged_group_name(pm), std::move(x), Metric(std::move(m), kind)};
}

Index total_count(const PreparedModel& pm) {
    Index k = 0;
    for (Index c : pm.model.counts) k += c;
    return k;
}

FitResult single_group(const RunConfig& cfg, const PreparedModel& pm) {
    const ThematicModel& model = pm.model;
    const Weights& w = model.weights;
    FitResult out;
    out.algorithm = cfg.algorithm;
    out.predictor_variables.emplace_back();
    out.predictors.push_back(merge_predictors(pm, out.predictor_variables.front()));
    const Block& x = out.predictors.front();
    const Index k = total_count(pm);
    if (k < 1) throw ConfigError(std::string(to_string(cfg.algorithm)) + " needs at least one component");

    ModelComponents& mc = out.components;
    mc.group_names = {x.name};
    if (cfg.algorithm == Algorithm::pls1) {
        mc.groups.push_back(pls1(x.x, x.metric, model.dependent.x.col(0), w, k, x.name).components);
        if (model.dependent_count > 0)
            mc.dependent = dependent_components(mc, model.dependent.x, model.dependent.metric,
                                                model.dependent_count, w, model.dependent.name);
    } else {
        auto r = ln_pls2(x.x, x.metric, model.dependent.x, model.dependent.metric, k, model.dependent_count, w,
                         x.name, model.dependent.name, cfg.nesting);
        mc.groups.push_back(std::move(r.f));
        mc.dependent = std::move(r.g);
    }
    mc.criterion = c5(model.dependent.x, model.dependent.metric.matrix(), mc.predictor_scores(), w);
    mc.criterion_trace.emplace_back(1, mc.criterion);
    mc.max_delta_trace.push_back(0.0);
    mc.iterations = 1;
    mc.converged = true;
    return out;
}

} // namespace

FitResult run_algorithm(const RunConfig& cfg, const PreparedModel& pm) {
    if (cfg.algorithm == Algorithm::pls1 || cfg.algorithm == Algorithm::ln_pls2) return single_group(cfg, pm);

    FitResult out;
    out.algorithm = cfg.algorithm;
    out.predictors = pm.model.predictors;
    out.predictor_variables = pm.predictor_variables;
    switch (cfg.algorithm) {
    case Algorithm::seer_a3:
        out.components = a3(pm.model);
        break;
    case Algorithm::seer_b2:
        out.components = b2(pm.model);
        break;
    case Algorithm::select: {
        const ModelComponents full = a3(pm.model);
        SelectionStop stop{pm.min_counts, cfg.score_threshold};
        out.selection = backward_select(pm.model, full, cfg.omega, stop);
        out.components = out.selection->final_model;
        break;
    }
    default:
        break;
    }
    return out;
}

} // namespace seer::cli

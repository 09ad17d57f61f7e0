#include "seer/cli/report.hpp"

#include "seer/cli/csv.hpp"
#include "seer/criteria.hpp"
#include "seer/errors.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace seer::cli {

namespace fs = std::filesystem;

std::string fixed3(double v) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    if (s == "-0.000") s = "0.000";
    return s;
}

std::string exact(double v) {
    if (std::isnan(v)) return "NA";
    if (v == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

PlaneRequest parse_plane(const std::string& spec) {
    const auto colon = spec.rfind(':');
    const auto comma = spec.find(',', colon == std::string::npos ? 0 : colon);
    if (colon == std::string::npos || colon == 0 || comma == std::string::npos)
        throw ConfigError("plane '" + spec + "': expected group:j,k");
    PlaneRequest r;
    r.group = spec.substr(0, colon);
    double a = 0, b = 0;
    if (!parse_number(spec.substr(colon + 1, comma - colon - 1), a) || !parse_number(spec.substr(comma + 1), b) ||
        a != std::floor(a) || b != std::floor(b))
        throw ConfigError("plane '" + spec + "': component ranks must be integers");
    r.first = static_cast<int>(a);
    r.second = static_cast<int>(b);
    return r;
}

namespace {

std::string label(const std::string& group, int rank) { return group + "^" + std::to_string(rank); }

struct LabeledScore {
    std::string label;
    const Component* component;
};

std::vector<LabeledScore> predictor_columns(const FitResult& fit) {
    std::vector<LabeledScore> out;
    const auto& mc = fit.components;
    for (std::size_t r = 0; r < mc.groups.size(); ++r)
        for (const auto& c : mc.groups[r]) out.push_back({label(mc.group_names[r], c.rank), &c});
    return out;
}

std::vector<LabeledScore> dependent_columns(const PreparedModel& pm, const FitResult& fit) {
    std::vector<LabeledScore> out;
    for (const auto& c : fit.components.dependent) out.push_back({label(pm.model.dependent.name, c.rank), &c});
    return out;
}

/// Group data and variable names a component of `group` is read against.
struct GroupView {
    const MatrixXd* x = nullptr;
    const std::vector<std::string>* variables = nullptr;
    const std::vector<Component>* components = nullptr;
};

/// A plane's group may be named or given as a 1-based predictor index.
PlaneRequest canonical(const FitResult& fit, PlaneRequest req) {
    for (const auto& b : fit.predictors)
        if (b.name == req.group) return req;
    double r = 0.0;
    if (parse_number(req.group, r) && r == std::floor(r) && r >= 1 && r <= static_cast<double>(fit.predictors.size()))
        req.group = fit.predictors[static_cast<std::size_t>(r) - 1].name;
    return req;
}

std::optional<GroupView> find_group(const PreparedModel& pm, const FitResult& fit, const std::string& group) {
    for (std::size_t r = 0; r < fit.predictors.size(); ++r)
        if (fit.predictors[r].name == group)
            return GroupView{&fit.predictors[r].x, &fit.predictor_variables[r], &fit.components.groups[r]};
    if (group == pm.model.dependent.name)
        return GroupView{&pm.model.dependent.x, &pm.dependent_variables, &fit.components.dependent};
    return std::nullopt;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

template <class F>
std::string render(F&& f) {
    std::ostringstream os;
    f(os);
    return os.str();
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, '\t')) out.push_back(cell);
    if (!line.empty() && line.back() == '\t') out.emplace_back();
    return out;
}

std::vector<std::vector<std::string>> read_tsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) rows.push_back(split_tabs(line));
    }
    if (rows.empty()) throw ConfigError("'" + path + "' is empty");
    return rows;
}

double number_at(const std::string& cell, const std::string& path) {
    double v = 0.0;
    if (!parse_number(cell, v)) throw NonNumericCell(path + ": '" + cell + "'");
    return v;
}

} // namespace

void write_components(std::ostream& out, const PreparedModel& pm, const FitResult& fit) {
    const Weights& w = pm.model.weights;
    out << "group\trank\tvalue\tvariable\tloading\tcorrelation\n";
    auto emit = [&](const std::string& group, const std::vector<Component>& comps, const MatrixXd& x,
                    const std::vector<std::string>& vars) {
        for (const auto& c : comps)
            for (Index j = 0; j < x.cols(); ++j)
                out << group << '\t' << c.rank << '\t' << fixed3(c.eigenvalue) << '\t' << vars[j] << '\t'
                    << fixed3(c.loading(j)) << '\t' << fixed3(weighted_corr(x.col(j), c.score, w)) << '\n';
    };
    for (std::size_t r = 0; r < fit.predictors.size(); ++r)
        emit(fit.predictors[r].name, fit.components.groups[r], fit.predictors[r].x, fit.predictor_variables[r]);
    emit(pm.model.dependent.name, fit.components.dependent, pm.model.dependent.x, pm.dependent_variables);
}

namespace {

struct Response {
    std::string name;
    VectorXd y;
};

std::vector<Response> responses(const PreparedModel& pm, const FitResult& fit) {
    std::vector<Response> out;
    for (const auto& d : dependent_columns(pm, fit)) out.push_back({d.label, d.component->score});
    for (Index k = 0; k < pm.model.dependent.x.cols(); ++k)
        out.push_back({pm.dependent_variables[k], pm.model.dependent.x.col(k)});
    return out;
}

} // namespace

void write_r2_table(std::ostream& out, const PreparedModel& pm, const FitResult& fit) {
    const Weights& w = pm.model.weights;
    const auto cols = predictor_columns(fit);
    const MatrixXd z = fit.components.predictor_scores();
    out << "response\tR2";
    for (const auto& c : cols) out << '\t' << c.label;
    out << '\n';
    for (const auto& resp : responses(pm, fit)) {
        out << resp.name;
        try {
            const RegressionSummary s = pseudo_pvalues(resp.y, z, w);
            out << '\t' << fixed3(s.r2);
            for (const auto& t : s.terms) {
                const std::string stars = significance_stars(t.p_value);
                out << '\t' << (stars.empty() ? std::string() : fixed3(t.std_coefficient) + " " + stars);
            }
        } catch (const InsufficientDof&) {
            out << '\t' << fixed3(z.cols() ? r_squared(resp.y, z, w) : 0.0);
            for (std::size_t i = 0; i < cols.size(); ++i) out << "\tNA";
        }
        out << '\n';
    }
}

void write_convergence(std::ostream& out, const FitResult& fit) {
    const auto& mc = fit.components;
    out << "iteration\tcriterion\tmax_delta\n";
    for (std::size_t i = 0; i < mc.criterion_trace.size(); ++i) {
        const double d = i < mc.max_delta_trace.size() ? mc.max_delta_trace[i] : std::nan("");
        out << mc.criterion_trace[i].first << '\t' << exact(mc.criterion_trace[i].second) << '\t' << exact(d)
            << '\n';
    }
}

void write_plane(std::ostream& out, const PreparedModel& pm, const FitResult& fit, const PlaneRequest& request,
                 bool all_variables) {
    const PlaneRequest req = canonical(fit, request);
    const auto view = find_group(pm, fit, req.group);
    if (!view) throw UnknownComponent("plane: no group named '" + req.group + "'");
    const auto& comps = *view->components;
    for (int j : {req.first, req.second})
        if (j < 1 || j > static_cast<int>(comps.size()))
            throw UnknownComponent("plane: group " + req.group + " has " + std::to_string(comps.size()) +
                                   " component(s), rank " + std::to_string(j) + " requested");
    if (req.first == req.second) throw UnknownComponent("plane: the two ranks must differ");

    const Weights& w = pm.model.weights;
    const VectorXd& a = comps[req.first - 1].score;
    const VectorXd& b = comps[req.second - 1].score;
    out << "kind\tgroup\tname\t" << label(req.group, req.first) << '\t' << label(req.group, req.second) << '\n';

    auto variables = [&](const std::string& group, const MatrixXd& x, const std::vector<std::string>& names) {
        for (Index j = 0; j < x.cols(); ++j)
            out << "variable\t" << group << '\t' << names[j] << '\t' << exact(weighted_corr(x.col(j), a, w)) << '\t'
                << exact(weighted_corr(x.col(j), b, w)) << '\n';
    };
    if (all_variables) {
        for (std::size_t r = 0; r < fit.predictors.size(); ++r)
            variables(fit.predictors[r].name, fit.predictors[r].x, fit.predictor_variables[r]);
        variables(pm.model.dependent.name, pm.model.dependent.x, pm.dependent_variables);
    } else {
        variables(req.group, *view->x, *view->variables);
    }
    const VectorXd sa = standardized(a, w), sb = standardized(b, w);
    for (std::size_t i = 0; i < pm.ids.size(); ++i)
        out << "observation\t-\t" << pm.ids[i] << '\t' << exact(sa(static_cast<Index>(i))) << '\t'
            << exact(sb(static_cast<Index>(i))) << '\n';
}

void write_outputs(const std::string& dir, const RunConfig& cfg, const PreparedModel& pm, const FitResult& fit,
                   const OutputOptions& opts) {
    // Render every plane first so that a bad request leaves no partial output.
    std::vector<std::pair<std::string, std::string>> planes;
    for (const auto& asked : opts.planes) {
        const PlaneRequest req = canonical(fit, asked);
        const std::string name = "plane_" + req.group + "_" + std::to_string(req.first) + "_" +
                                 std::to_string(req.second) + ".tsv";
        planes.emplace_back(name, render([&](std::ostream& os) { write_plane(os, pm, fit, req, opts.all_variables); }));
    }

    const fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());

    const auto& mc = fit.components;
    const Weights& w = pm.model.weights;
    const auto pcols = predictor_columns(fit);
    const auto dcols = dependent_columns(pm, fit);

    write_file(root / "components.tsv", render([&](std::ostream& os) { write_components(os, pm, fit); }));
    write_file(root / "r2_table.tsv", render([&](std::ostream& os) { write_r2_table(os, pm, fit); }));
    write_file(root / "convergence.log", render([&](std::ostream& os) { write_convergence(os, fit); }));

    write_file(root / "scores.tsv", render([&](std::ostream& os) {
        os << "id";
        for (const auto& c : pcols) os << '\t' << c.label;
        for (const auto& c : dcols) os << '\t' << c.label;
        os << '\n';
        for (std::size_t i = 0; i < pm.ids.size(); ++i) {
            os << pm.ids[i];
            for (const auto& c : pcols) os << '\t' << exact(c.component->score(static_cast<Index>(i)));
            for (const auto& c : dcols) os << '\t' << exact(c.component->score(static_cast<Index>(i)));
            os << '\n';
        }
    }));

    write_file(root / "loadings.tsv", render([&](std::ostream& os) {
        os << "group\trank\tvariable\tloading\n";
        auto emit = [&](const std::string& g, const std::vector<Component>& comps, const std::vector<std::string>& v) {
            for (const auto& c : comps)
                for (Index j = 0; j < c.loading.size(); ++j)
                    os << g << '\t' << c.rank << '\t' << v[j] << '\t' << exact(c.loading(j)) << '\n';
        };
        for (std::size_t r = 0; r < fit.predictors.size(); ++r)
            emit(fit.predictors[r].name, mc.groups[r], fit.predictor_variables[r]);
        emit(pm.model.dependent.name, mc.dependent, pm.dependent_variables);
    }));

    write_file(root / "regression.tsv", render([&](std::ostream& os) {
        os << "response\tcomponent\tcoefficient\tstd_coefficient\tt_value\tp_value\n";
        const MatrixXd z = mc.predictor_scores();
        for (const auto& resp : responses(pm, fit)) {
            try {
                const RegressionSummary s = pseudo_pvalues(resp.y, z, w);
                for (std::size_t j = 0; j < s.terms.size(); ++j) {
                    const auto& t = s.terms[j];
                    os << resp.name << '\t' << pcols[j].label << '\t' << exact(t.coefficient) << '\t'
                       << exact(t.std_coefficient) << '\t' << exact(t.t_value) << '\t' << exact(t.p_value) << '\n';
                }
            } catch (const InsufficientDof&) {
            }
        }
    }));

    write_file(root / "summary.tsv", render([&](std::ostream& os) {
        os << "key\tvalue\n";
        os << "algorithm\t" << to_string(fit.algorithm) << '\n';
        if (fit.algorithm == Algorithm::ln_pls2) os << "pls2_nesting\t" << to_string(cfg.nesting) << '\n';
        os << "seed\t" << (cfg.seed ? std::to_string(*cfg.seed) : std::string("none")) << '\n';
        os << "observations\t" << pm.ids.size() << '\n';
        os << "converged\t" << (mc.converged ? "true" : "false") << '\n';
        os << "iterations\t" << mc.iterations << '\n';
        os << "criterion\t" << exact(mc.criterion) << '\n';
        os << "dependent\t" << pm.model.dependent.name << '\n';
        os << "dependent_components\t" << mc.dependent.size() << '\n';
        for (std::size_t r = 0; r < fit.predictors.size(); ++r)
            os << "group\t" << fit.predictors[r].name << ':' << mc.groups[r].size() << '\n';
    }));

    if (fit.selection) {
        write_file(root / "selection.tsv", render([&](std::ostream& os) {
            os << "step\tremoved_group\tremoved_rank";
            for (const auto& b : fit.predictors) os << "\tscore:" << b.name;
            os << "\trefit_criterion\n";
            for (const auto& s : fit.selection->steps) {
                os << s.step << '\t' << fit.predictors[s.group].name << '\t' << s.removed_rank;
                for (double v : s.scores) os << '\t' << exact(v);
                os << '\t' << exact(s.refit_criterion) << '\n';
            }
            // retained counts in the rank column, scores at the stopping point
            os << "final\t-\t";
            for (std::size_t r = 0; r < fit.predictors.size(); ++r)
                os << (r ? "," : "") << fit.predictors[r].name << ':' << fit.selection->final_counts[r];
            for (double v : fit.selection->final_scores) os << '\t' << exact(v);
            os << "\t" << exact(fit.components.criterion) << '\n';
        }));
    }

    for (const auto& [name, text] : planes) write_file(root / name, text);
}

ScoreTable read_scores(const std::string& path) {
    const auto rows = read_tsv(path);
    ScoreTable t;
    if (rows.front().empty() || rows.front().front() != "id") throw ConfigError(path + ": not a scores file");
    t.columns.assign(rows.front().begin() + 1, rows.front().end());
    t.values.resize(static_cast<Index>(rows.size() - 1), static_cast<Index>(t.columns.size()));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != t.columns.size() + 1) throw ConfigError(path + ": ragged row " + std::to_string(i));
        t.ids.push_back(rows[i][0]);
        for (std::size_t j = 0; j < t.columns.size(); ++j)
            t.values(static_cast<Index>(i - 1), static_cast<Index>(j)) = number_at(rows[i][j + 1], path);
    }
    return t;
}

std::vector<LoadingRow> read_loadings(const std::string& path) {
    const auto rows = read_tsv(path);
    std::vector<LoadingRow> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 4) throw ConfigError(path + ": ragged row " + std::to_string(i));
        out.push_back({rows[i][0], static_cast<int>(number_at(rows[i][1], path)), rows[i][2],
                       number_at(rows[i][3], path)});
    }
    return out;
}

std::map<std::string, std::string> read_summary(const std::string& path) {
    const auto rows = read_tsv(path);
    std::map<std::string, std::string> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2) throw ConfigError(path + ": ragged row " + std::to_string(i));
        auto& slot = out[rows[i][0]];
        slot += (slot.empty() ? "" : ",") + rows[i][1];
    }
    return out;
}

} // namespace seer::cli

#include "seer/seer.hpp"

#include "seer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace seer {

namespace {

MatrixXd hcat(const std::vector<VectorXd>& cols, Index n) {
    MatrixXd out(n, static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Index>(i)) = cols[i];
    return out;
}

Index numeric_rank(const MatrixXd& x, const Weights& w) {
    if (x.cols() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram(x, w), Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    if (!(top > 0.0)) return 0;
    Index r = 0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > kSingularTol * top) ++r;
    return r;
}

/// Starting score for rank `j` (0-based) of a group.
VectorXd initial_score(const Block& b, Index j, const ConvergenceOptions& opts, const Weights& w) {
    if (opts.init == InitKind::column && b.x.cols() > 0) {
        const Index col = (std::clamp<Index>(opts.init_column, 0, b.x.cols() - 1) + j) % b.x.cols();
        return b.x.col(col);
    }
    const Index k = std::min<Index>(j + 1, b.x.cols());
    return triplet_pca(b.x, b.metric, w, k).components[static_cast<std::size_t>(k - 1)].score;
}

/// Flips score and loading so that the loading's largest entry is positive.
void orient(Component& c) {
    VectorXd probe = c.loading;
    fix_sign(probe);
    if (probe.size() > 0 && probe.dot(c.loading) < 0) {
        c.loading = -c.loading;
        c.score = -c.score;
    }
}

double max_delta(const std::vector<VectorXd>& before, const std::vector<VectorXd>& after, const Weights& w) {
    double d = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i) d = std::max(d, aligned_distance(before[i], after[i], w));
    return d;
}

A0Run summarize(const A0Result& r, const std::string& group, int rank) {
    return {group, rank, r.iterations, r.converged, r.iterations_to_1e6, r.monotone};
}

std::string where(const std::string& group, int rank) {
    return "group " + group + ", rank " + std::to_string(rank);
}

const VectorXd* start_f(const StartValues& start, std::size_t r, std::size_t j) {
    if (r < start.f.size() && j < start.f[r].size() && start.f[r][j].size() > 0) return &start.f[r][j];
    return nullptr;
}

} // namespace

void ConvergenceOptions::validate() const {
    if (!(component_tol > 0.0) || !(inner_tol > 0.0))
        throw std::invalid_argument("convergence tolerances must be positive");
    if (max_outer < 1 || max_inner < 1) throw std::invalid_argument("iteration caps must be >= 1");
}

void ThematicModel::validate() const {
    options.validate();
    if (predictors.empty()) throw ConfigError("the model needs at least one predictor group");
    if (counts.size() != predictors.size()) throw ConfigError("one component count per predictor group is required");
    std::set<std::string> names{dependent.name};
    for (std::size_t r = 0; r < predictors.size(); ++r) {
        const Block& b = predictors[r];
        if (!names.insert(b.name).second) throw ConfigError("duplicate group name '" + b.name + "'");
        if (b.x.rows() != weights.size()) throw ConfigError("group " + b.name + ": row count mismatch");
        if (counts[r] < 0 || counts[r] > numeric_rank(b.x, weights)) {
            std::ostringstream os;
            os << "group " << b.name << ": component count " << counts[r] << " exceeds its rank";
            throw ConfigError(os.str());
        }
    }
    if (dependent.x.rows() != weights.size()) throw ConfigError("dependent group: row count mismatch");
    if (dependent_count < 0 || dependent_count > numeric_rank(dependent.x, weights))
        throw ConfigError("dependent component count exceeds the rank of " + dependent.name);
}

A0Result a0(const CriterionContext& ctx, const MatrixXd& x, const Metric& m, const ConvergenceOptions& opts,
            const std::optional<VectorXd>& init, const std::string& group_id, int rank) {
    const Weights& w = ctx.weights();
    const auto sw = ctx.sandwich(x);
    const MatrixXd& l = m.chol();
    const MatrixXd xl = x * l;  // F = X L t with ||t|| = 1 <=> F = XMu, u'Mu = 1
    const VectorXd sqrt_p = w.p().array().sqrt();

    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod;
    cod.setThreshold(1e-10);
    cod.compute(sqrt_p.asDiagonal() * xl);

    // Rescales a direction of <X> to its unit-loading representative.
    auto to_unit = [&](const VectorXd& f, VectorXd& u, VectorXd& score) {
        VectorXd t = cod.solve(sqrt_p.cwiseProduct(f));
        const double nt = t.norm();
        if (!(nt > 0.0)) return false;
        t /= nt;
        u = l.transpose().triangularView<Eigen::Upper>().solve(t);
        score = xl * t;
        const double pp = w.norm2(score);
        return pp > 0.0 && ctx.quad_b(score) > 1e-12 * pp;
    };

    VectorXd u, f;
    bool ok = false;
    if (init && init->size() == x.rows()) ok = to_unit(*init, u, f);
    if (!ok && opts.init == InitKind::column && x.cols() > 0)
        ok = to_unit(x.col(std::clamp<Index>(opts.init_column, 0, x.cols() - 1)), u, f);
    if (!ok && x.cols() > 0) {
        auto pc = max_gen_eig(sw.p, m, 1).front();
        ok = to_unit(x * (m.matrix() * pc.vector), u, f);
    }
    if (!ok && x.cols() > 0) {
        // Direction of <X> farthest from the conditioning span.
        auto far = max_gen_eig(sw.b, m, 1).front();
        if (far.value > 1e-12 * std::max(1e-300, (m.matrix() * sw.p).trace())) {
            u = far.vector;
            f = x * (m.matrix() * u);
            ok = true;
        }
    }
    if (!ok) throw DegenerateComponent(where(group_id, rank) + ": group lies inside the conditioning span");

    A0Result out;
    double c_prev = ctx.criterion(f);
    out.criterion_trace.push_back(c_prev);

    VectorXd t_cur = l.transpose() * u;
    VectorXd best_f = f, best_u = u;
    double best_c = c_prev;
    for (int it = 1; it <= opts.max_inner; ++it) {
        const BetaGamma bg = beta_gamma(f, ctx);
        MatrixXd s = bg.gamma * sw.a + bg.beta * sw.p - bg.gamma * bg.beta * sw.b;
        s = 0.5 * (s + s.transpose());
        VectorXd t_new = l.transpose() * max_gen_eig(s, m, 1).front().vector;
        if (t_new.dot(t_cur) < 0.0) t_new = -t_new;

        VectorXd f_new = xl * t_new;
        double c = ctx.criterion(f_new);
        const double slack = 1e-13 * std::max(1.0, std::abs(c_prev));
        if (opts.safeguard && c < c_prev - slack) {
            // The step toward t_new is an ascent direction of the criterion,
            // so a short enough move along the arc cannot lose ground.
            bool moved = false;
            for (double step = 0.5; step > 1e-12; step *= 0.5) {
                VectorXd t_try = ((1.0 - step) * t_cur + step * t_new).normalized();
                VectorXd f_try = xl * t_try;
                const double c_try = ctx.criterion(f_try);
                if (c_try >= c_prev - slack) {
                    t_new = std::move(t_try);
                    f_new = std::move(f_try);
                    c = c_try;
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                t_new = t_cur;
                f_new = f;
                c = c_prev;
            }
        }
        const double delta = aligned_distance(f_new, f, w);

        out.criterion_trace.push_back(c);
        out.delta_trace.push_back(delta);
        if (c < c_prev - 1e-12 * std::max(1.0, std::abs(c_prev))) out.monotone = false;
        if (out.iterations_to_1e6 < 0 && delta < 1e-6) out.iterations_to_1e6 = it;

        t_cur = std::move(t_new);
        f = std::move(f_new);
        u = l.transpose().triangularView<Eigen::Upper>().solve(t_cur);
        c_prev = c;
        out.iterations = it;
        if (c >= best_c) {
            best_c = c;
            best_f = f;
            best_u = u;
        }
        if (delta < opts.inner_tol) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged) {
        f = best_f;
        u = best_u;
        c_prev = best_c;
    }

    out.coefficients = beta_gamma(f, ctx);
    const BetaGamma& bg = out.coefficients;
    const VectorXd t = bg.gamma * ctx.apply_a(f) + bg.beta * ctx.apply_p(f) - bg.gamma * bg.beta * ctx.apply_b(f);
    const VectorXd image = x * (m.matrix() * (x.transpose() * t));
    const double scale = c_prev * w.norm(f);
    out.stationarity_residual = scale > 0.0 ? w.norm(image - c_prev * f) / scale : 0.0;

    out.component.score = std::move(f);
    out.component.loading = std::move(u);
    out.component.group_id = group_id;
    out.component.rank = rank;
    out.component.eigenvalue = c_prev;
    return out;
}

MatrixXd ModelComponents::predictor_scores() const {
    std::vector<VectorXd> cols;
    Index n = 0;
    for (const auto& g : groups)
        for (const auto& c : g) {
            cols.push_back(c.score);
            n = c.score.size();
        }
    return hcat(cols, n);
}

std::vector<Index> ModelComponents::counts() const {
    std::vector<Index> out;
    for (const auto& g : groups) out.push_back(static_cast<Index>(g.size()));
    return out;
}

ModelComponents a2(const MatrixXd& y, const Metric& n, const std::vector<Block>& predictors, const Weights& w,
                   const ConvergenceOptions& opts, const StartValues& start) {
    opts.validate();
    if (predictors.empty()) throw ConfigError("at least one predictor group is required");
    const std::size_t groups = predictors.size();
    const Index rows = w.size();

    std::vector<Component> current(groups);
    for (std::size_t r = 0; r < groups; ++r) {
        const VectorXd* s = start_f(start, r, 0);
        current[r].score = s ? *s : initial_score(predictors[r], 0, opts, w);
        current[r].group_id = predictors[r].name;
    }

    ModelComponents mc;
    for (const auto& b : predictors) mc.group_names.push_back(b.name);
    std::vector<Component> best = current;
    double best_c = -std::numeric_limits<double>::infinity();

    for (int k = 1; k <= opts.max_outer; ++k) {
        std::vector<VectorXd> before;
        for (const auto& c : current) before.push_back(c.score);

        for (std::size_t r = 0; r < groups; ++r) {
            std::vector<VectorXd> others;
            for (std::size_t s = 0; s < groups; ++s)
                if (s != r) others.push_back(current[s].score);
            const CriterionContext ctx(y, n.matrix(), hcat(others, rows), w);
            auto res = a0(ctx, predictors[r].x, predictors[r].metric, opts, current[r].score, predictors[r].name, 1);
            mc.a0_runs.push_back(summarize(res, predictors[r].name, 1));
            current[r] = std::move(res.component);
        }

        std::vector<VectorXd> after;
        for (const auto& c : current) after.push_back(c.score);
        const double crit = c5(y, n.matrix(), hcat(after, rows), w);
        const double delta = max_delta(before, after, w);
        mc.criterion_trace.emplace_back(k, crit);
        mc.max_delta_trace.push_back(delta);
        mc.iterations = k;
        if (crit >= best_c) {
            best_c = crit;
            best = current;
        }
        if (delta < opts.component_tol) {
            mc.converged = true;
            break;
        }
    }
    if (!mc.converged) current = best;

    std::vector<VectorXd> final_scores;
    for (auto& c : current) {
        orient(c);
        final_scores.push_back(c.score);
        mc.groups.push_back({c});
    }
    mc.criterion = c5(y, n.matrix(), hcat(final_scores, rows), w);
    return mc;
}

ModelComponents a1(const VectorXd& y, const std::vector<Block>& predictors, const Weights& w,
                   const ConvergenceOptions& opts, const StartValues& start) {
    return a2(MatrixXd(y), Metric::identity(1), predictors, w, opts, start);
}

namespace {

using GroupScores = std::vector<std::vector<Component>>;

std::vector<VectorXd> flatten(const GroupScores& comps) {
    std::vector<VectorXd> out;
    for (const auto& g : comps)
        for (const auto& c : g) out.push_back(c.score);
    return out;
}

/// One locally nested sweep over every predictor component, each solved by
/// A0 against the dependent block (y, n) with all other components fixed.
void nested_sweep(const std::vector<Block>& predictors, GroupScores& current, const MatrixXd& y,
                  const MatrixXd& n, const Weights& w, const ConvergenceOptions& opts, ModelComponents& mc) {
    const Index rows = w.size();
    for (std::size_t r = 0; r < predictors.size(); ++r) {
        const Block& b = predictors[r];
        for (std::size_t j = 0; j < current[r].size(); ++j) {
            const int rank = static_cast<int>(j + 1);
            std::vector<VectorXd> own_lower;
            for (std::size_t h = 0; h < j; ++h) own_lower.push_back(current[r][h].score);
            std::vector<VectorXd> cond;
            for (std::size_t s = 0; s < predictors.size(); ++s)
                if (s != r)
                    for (const auto& c : current[s]) cond.push_back(c.score);
            cond.insert(cond.end(), own_lower.begin(), own_lower.end());

            try {
                const MatrixXd x_defl =
                    own_lower.empty() ? b.x : Projector(hcat(own_lower, rows), w, "own components").residual(b.x);
                const CriterionContext ctx(y, n, hcat(cond, rows), w);
                auto res = a0(ctx, x_defl, b.metric, opts, current[r][j].score, b.name, rank);
                mc.a0_runs.push_back(summarize(res, b.name, rank));
                current[r][j] = std::move(res.component);
            } catch (const DegenerateComponent& e) {
                throw DegenerateComponent(where(b.name, rank) + ": " + e.what());
            } catch (const SingularBasis& e) {
                throw SingularBasis(where(b.name, rank) + ": " + e.what());
            }
        }
    }
}

GroupScores initial_groups(const std::vector<Block>& predictors, const std::vector<Index>& counts,
                           const Weights& w, const ConvergenceOptions& opts, const StartValues& start) {
    GroupScores current(predictors.size());
    for (std::size_t r = 0; r < predictors.size(); ++r) {
        for (Index j = 0; j < counts[r]; ++j) {
            Component c;
            const VectorXd* s = start_f(start, r, static_cast<std::size_t>(j));
            c.score = s ? *s : initial_score(predictors[r], j, opts, w);
            c.group_id = predictors[r].name;
            c.rank = static_cast<int>(j + 1);
            current[r].push_back(std::move(c));
        }
    }
    return current;
}

double c5_or_zero(const MatrixXd& y, const MatrixXd& n, const std::vector<VectorXd>& scores, const Weights& w) {
    if (scores.empty()) return 0.0;
    return c5(y, n, hcat(scores, w.size()), w);
}

} // namespace

ModelComponents a3(const ThematicModel& model, const StartValues& start) {
    model.validate();
    const auto& opts = model.options;
    const Weights& w = model.weights;
    const MatrixXd& y = model.dependent.x;
    const MatrixXd& n = model.dependent.metric.matrix();

    GroupScores current = initial_groups(model.predictors, model.counts, w, opts, start);
    ModelComponents mc;
    for (const auto& b : model.predictors) mc.group_names.push_back(b.name);

    const bool any = std::any_of(model.counts.begin(), model.counts.end(), [](Index c) { return c > 0; });
    GroupScores best = current;
    double best_c = -std::numeric_limits<double>::infinity();
    if (any) {
        for (int k = 1; k <= opts.max_outer; ++k) {
            const auto before = flatten(current);
            nested_sweep(model.predictors, current, y, n, w, opts, mc);
            const auto after = flatten(current);
            const double crit = c5_or_zero(y, n, after, w);
            const double delta = max_delta(before, after, w);
            mc.criterion_trace.emplace_back(k, crit);
            mc.max_delta_trace.push_back(delta);
            mc.iterations = k;
            if (crit >= best_c) {
                best_c = crit;
                best = current;
            }
            if (delta < opts.component_tol) {
                mc.converged = true;
                break;
            }
        }
        if (!mc.converged) current = best;
    } else {
        mc.converged = true;
    }

    for (auto& g : current)
        for (auto& c : g) orient(c);
    mc.groups = std::move(current);
    mc.criterion = c5_or_zero(y, n, flatten(mc.groups), w);
    if (model.dependent_count > 0 && any)
        mc.dependent = dependent_components(mc, y, model.dependent.metric, model.dependent_count, w, model.dependent.name);
    return mc;
}

std::vector<Component> dependent_components(const ModelComponents& mc, const MatrixXd& y, const Metric& n, Index l,
                                            const Weights& w, const std::string& y_id) {
    auto gs = mra_components(mc.predictor_scores(), y, n, l, w, y_id);
    for (auto& g : gs) orient(g);
    return gs;
}

ModelComponents b1(const MatrixXd& y, const Metric& n, const std::vector<Block>& predictors, const Weights& w,
                   const ConvergenceOptions& opts, const StartValues& start) {
    opts.validate();
    if (predictors.empty()) throw ConfigError("at least one predictor group is required");
    const std::size_t groups = predictors.size();
    const Index rows = w.size();

    std::vector<Component> current(groups);
    for (std::size_t r = 0; r < groups; ++r) {
        const VectorXd* s = start_f(start, r, 0);
        current[r].score = s ? *s : initial_score(predictors[r], 0, opts, w);
        current[r].group_id = predictors[r].name;
    }
    Component g;
    g.group_id = "Y";
    if (!start.g.empty() && start.g.front().size() == rows) {
        g.score = start.g.front();
    } else {
        const Block yb{"Y", y, n};
        g.score = initial_score(yb, 0, opts, w);
    }

    ModelComponents mc;
    for (const auto& b : predictors) mc.group_names.push_back(b.name);
    std::vector<Component> best = current;
    Component best_g = g;
    double best_c = -std::numeric_limits<double>::infinity();

    for (int k = 1; k <= opts.max_outer; ++k) {
        std::vector<VectorXd> before;
        for (const auto& c : current) before.push_back(c.score);
        before.push_back(g.score);

        for (std::size_t r = 0; r < groups; ++r) {
            std::vector<VectorXd> others;
            for (std::size_t s = 0; s < groups; ++s)
                if (s != r) others.push_back(current[s].score);
            const auto ctx = CriterionContext::single(g.score, hcat(others, rows), w);
            auto res = a0(ctx, predictors[r].x, predictors[r].metric, opts, current[r].score, predictors[r].name, 1);
            mc.a0_runs.push_back(summarize(res, predictors[r].name, 1));
            current[r] = std::move(res.component);
        }
        std::vector<VectorXd> after;
        for (const auto& c : current) after.push_back(c.score);
        const MatrixXd f_all = hcat(after, rows);
        Component g_new = mra_components(f_all, y, n, 1, w).front();
        if (w.dot(g_new.score, g.score) < 0.0) {
            g_new.score = -g_new.score;
            g_new.loading = -g_new.loading;
        }
        g = std::move(g_new);
        after.push_back(g.score);

        const double crit = c6(g.score, f_all, w);
        const double delta = max_delta(before, after, w);
        mc.criterion_trace.emplace_back(k, crit);
        mc.max_delta_trace.push_back(delta);
        mc.iterations = k;
        if (crit >= best_c) {
            best_c = crit;
            best = current;
            best_g = g;
        }
        if (delta < opts.component_tol) {
            mc.converged = true;
            break;
        }
    }
    if (!mc.converged) {
        current = best;
        g = best_g;
    }

    std::vector<VectorXd> final_scores;
    for (auto& c : current) {
        orient(c);
        final_scores.push_back(c.score);
        mc.groups.push_back({c});
    }
    orient(g);
    mc.criterion = c6(g.score, hcat(final_scores, rows), w);
    mc.dependent.push_back(std::move(g));
    return mc;
}

ModelComponents b2(const ThematicModel& model, const StartValues& start) {
    model.validate();
    if (model.dependent_count < 1) throw ConfigError("b2 needs at least one dependent component");
    const auto& opts = model.options;
    const Weights& w = model.weights;
    const Index rows = w.size();
    const Index l = model.dependent_count;

    bool have_f = start.f.size() == model.predictors.size();
    for (std::size_t r = 0; have_f && r < model.predictors.size(); ++r)
        for (Index j = 0; j < model.counts[r]; ++j)
            if (!start_f(start, r, static_cast<std::size_t>(j))) have_f = false;

    ModelComponents mc;
    for (const auto& b : model.predictors) mc.group_names.push_back(b.name);
    GroupScores current;
    if (have_f) {
        current = initial_groups(model.predictors, model.counts, w, opts, start);
    } else {
        ThematicModel init = model;
        init.dependent_count = 0;
        current = a3(init, start).groups;
    }
    if (flatten(current).empty()) throw ConfigError("b2 needs at least one predictor component");

    std::vector<Component> gs;
    if (static_cast<Index>(start.g.size()) >= l) {
        for (Index i = 0; i < l; ++i) {
            Component g;
            g.score = start.g[static_cast<std::size_t>(i)];
            g.group_id = model.dependent.name;
            g.rank = static_cast<int>(i + 1);
            gs.push_back(std::move(g));
        }
    } else {
        gs = mra_components(hcat(flatten(current), rows), model.dependent.x, model.dependent.metric, l, w,
                            model.dependent.name);
    }

    GroupScores best = current;
    std::vector<Component> best_g = gs;
    double best_c = -std::numeric_limits<double>::infinity();
    const MatrixXd identity_l = MatrixXd::Identity(l, l);

    for (int k = 1; k <= opts.max_outer; ++k) {
        auto before = flatten(current);
        for (const auto& g : gs) before.push_back(g.score);

        std::vector<VectorXd> g_prev;
        for (const auto& g : gs) g_prev.push_back(g.score);
        const MatrixXd g_block = hcat(g_prev, rows);
        nested_sweep(model.predictors, current, g_block, identity_l, w, opts, mc);

        const auto f_scores = flatten(current);
        auto g_new = mra_components(hcat(f_scores, rows), model.dependent.x, model.dependent.metric, l, w,
                                    model.dependent.name);
        for (std::size_t i = 0; i < g_new.size(); ++i) {
            if (w.dot(g_new[i].score, gs[i].score) < 0.0) {
                g_new[i].score = -g_new[i].score;
                g_new[i].loading = -g_new[i].loading;
            }
        }
        gs = std::move(g_new);

        auto after = f_scores;
        std::vector<VectorXd> g_now;
        for (const auto& g : gs) {
            after.push_back(g.score);
            g_now.push_back(g.score);
        }
        const double crit = c5(hcat(g_now, rows), identity_l, hcat(f_scores, rows), w);
        const double delta = max_delta(before, after, w);
        mc.criterion_trace.emplace_back(k, crit);
        mc.max_delta_trace.push_back(delta);
        mc.iterations = k;
        if (crit >= best_c) {
            best_c = crit;
            best = current;
            best_g = gs;
        }
        if (delta < opts.component_tol) {
            mc.converged = true;
            break;
        }
    }
    if (!mc.converged) {
        current = best;
        gs = best_g;
    }
    for (auto& g : current)
        for (auto& c : g) orient(c);
    for (auto& g : gs) orient(g);
    mc.groups = std::move(current);
    mc.dependent = std::move(gs);
    std::vector<VectorXd> g_now;
    for (const auto& g : mc.dependent) g_now.push_back(g.score);
    mc.criterion = c5(hcat(g_now, rows), identity_l, mc.predictor_scores(), w);
    return mc;
}

double explained_trace(const MatrixXd& y, const MatrixXd& n_weights, const MatrixXd& basis, const Weights& w) {
    Projector proj(basis, w, "component span");
    if (proj.empty()) return 0.0;
    const MatrixXd qy = proj.basis().transpose() * w.p().asDiagonal() * y;
    return (n_weights * (qy.transpose() * qy)).trace();
}

double criterion_ratio(const ModelComponents& mc, const MatrixXd& y, const MatrixXd& n_weights, const Weights& w,
                       Index group) {
    if (group < 0 || group >= static_cast<Index>(mc.groups.size()))
        throw std::invalid_argument("criterion_ratio: group index out of range");
    const auto& g = mc.groups[static_cast<std::size_t>(group)];
    if (g.empty()) throw std::invalid_argument("criterion_ratio: group has no component to remove");

    std::vector<VectorXd> sub;
    for (std::size_t r = 0; r < mc.groups.size(); ++r) {
        const std::size_t keep = static_cast<Index>(r) == group ? mc.groups[r].size() - 1 : mc.groups[r].size();
        for (std::size_t j = 0; j < keep; ++j) sub.push_back(mc.groups[r][j].score);
    }
    const MatrixXd all = mc.predictor_scores();
    const double full = explained_trace(y, n_weights, all, w);
    const double reduced = sub.empty() ? 0.0 : explained_trace(y, n_weights, hcat(sub, w.size()), w);
    const double strength = w.norm2(g.back().score);
    if (!(reduced > 0.0)) return std::numeric_limits<double>::infinity();
    return strength * full / reduced;
}

const char* to_string(OmegaKind kind) {
    return kind == OmegaKind::inv_inertia ? "inv_inertia" : "inv_lambda1";
}

OmegaKind omega_kind_from_string(const std::string& s) {
    if (s == "inv_inertia") return OmegaKind::inv_inertia;
    if (s == "inv_lambda1") return OmegaKind::inv_lambda1;
    throw ConfigError("unknown omega kind '" + s + "'");
}

double omega(const Block& group, const Weights& w, OmegaKind kind) {
    const double denom = kind == OmegaKind::inv_inertia ? total_inertia(group.x, group.metric, w)
                                                        : largest_eigenvalue(group.x, group.metric, w);
    if (!(denom > 0.0)) throw DegenerateComponent("group " + group.name + " has zero inertia");
    return 1.0 / denom;
}

SelectionResult backward_select(const ThematicModel& model, const ModelComponents& mc, OmegaKind kind,
                                const SelectionStop& stop) {
    model.validate();
    const Weights& w = model.weights;
    const std::size_t groups = model.predictors.size();
    std::vector<double> omegas;
    for (const auto& b : model.predictors) omegas.push_back(omega(b, w, kind));

    SelectionResult out;
    ThematicModel current = model;
    current.counts = mc.counts();
    ModelComponents fit = mc;

    for (int step = 1;; ++step) {
        std::vector<double> scores(groups, std::numeric_limits<double>::quiet_NaN());
        std::optional<std::size_t> pick;
        for (std::size_t r = 0; r < groups; ++r) {
            if (fit.groups[r].empty()) continue;
            scores[r] = omegas[r] * criterion_ratio(fit, model.dependent.x, model.dependent.metric.matrix(), w,
                                                    static_cast<Index>(r));
            if (!pick || scores[r] < scores[*pick]) pick = r;
        }
        out.final_scores = scores;
        if (!pick) break;
        const std::size_t s = *pick;
        const Index floor = s < stop.min_counts.size() ? stop.min_counts[s] : 0;
        if (current.counts[s] <= floor) break;
        if (stop.score_threshold && scores[s] >= *stop.score_threshold) break;

        SelectionStep rec;
        rec.step = step;
        rec.group = static_cast<Index>(s);
        rec.removed_rank = static_cast<int>(current.counts[s]);
        rec.scores = scores;

        StartValues warm;
        warm.f.resize(groups);
        for (std::size_t r = 0; r < groups; ++r) {
            const std::size_t keep = r == s ? fit.groups[r].size() - 1 : fit.groups[r].size();
            for (std::size_t j = 0; j < keep; ++j) warm.f[r].push_back(fit.groups[r][j].score);
        }
        current.counts[s] -= 1;
        fit = a3(current, warm);
        rec.refit_criterion = fit.criterion;
        out.steps.push_back(std::move(rec));
    }
    out.final_counts = current.counts;
    out.final_model = std::move(fit);
    return out;
}

} // namespace seer

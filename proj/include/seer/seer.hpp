#pragma once

// Structural Equation Exploratory Regression: components of several
// predictor groups, each strong in its group and jointly predictive of a
// dependent group, extracted by fixed-point maximization of multiple
// covariance criteria.

#include "seer/criteria.hpp"
#include "seer/linalg.hpp"
#include "seer/pls.hpp"

#include <optional>
#include <string>
#include <vector>

namespace seer {

enum class InitKind { first_pc, column, given };

struct ConvergenceOptions {
    /// Max sign-aligned change of any standardized component between two
    /// outer iterations.
    double component_tol = 1e-9;
    /// Same measure between two A0 iterations.
    double inner_tol = 1e-9;
    int max_outer = 200;
    int max_inner = 200;
    InitKind init = InitKind::first_pc;
    /// Column used when init == column (clamped to the group width).
    Index init_column = 0;
    /// Halve an A0 step along the arc to the proposed direction whenever the
    /// plain fixed-point step would lower the criterion.
    bool safeguard = true;

    void validate() const;
};

/// A variable group with its metric.
struct Block {
    std::string name;
    MatrixXd x;
    Metric metric;
};

struct ThematicModel {
    Block dependent;               // (Y, N)
    std::vector<Block> predictors; // (X_r, M_r), r = 1..R
    std::vector<Index> counts;     // J_r
    Index dependent_count = 0;     // L
    Weights weights;
    ConvergenceOptions options;

    /// Checks R >= 1, unique names, 0 <= J_r <= rank(X_r), 0 <= L <= rank(Y).
    void validate() const;
};

/// Optional starting scores (per group, per rank) and dependent components.
struct StartValues {
    std::vector<std::vector<VectorXd>> f;
    std::vector<VectorXd> g;
};

/// Bookkeeping of one A0 run.
struct A0Run {
    std::string group;
    int rank = 1;
    int iterations = 0;
    bool converged = false;
    /// First iteration at which the component moved by less than 1e-6
    /// (-1 if it never did).
    int iterations_to_1e6 = -1;
    /// Criterion never decreased by more than 1e-12 (relative) between steps.
    bool monotone = true;
};

struct A0Result {
    Component component;
    bool converged = false;
    int iterations = 0;
    std::vector<double> criterion_trace;  // C(F(k)), k = 0, 1, ...
    std::vector<double> delta_trace;      // ||st F(k) - st F(k-1)||_P
    BetaGamma coefficients;               // at the returned component
    /// ||XMX'(gA + bP - gbB)F - lambda F||_P / (lambda ||F||_P)
    double stationarity_residual = 0.0;
    int iterations_to_1e6 = -1;
    bool monotone = true;
};

/// Fixed-point maximization of F'PF * F'AF / F'BF over F = XMu, u'Mu = 1.
/// Each step recomputes (beta, gamma) at the current F and takes the top
/// eigenvector of XMX'(gamma A + beta P - gamma beta B). On
/// non-convergence the best iterate is returned with converged = false.
/// Throws DegenerateComponent when <X> lies inside the conditioning span.
A0Result a0(const CriterionContext& ctx, const MatrixXd& x, const Metric& m,
            const ConvergenceOptions& opts, const std::optional<VectorXd>& init = std::nullopt,
            const std::string& group_id = "X", int rank = 1);

struct ModelComponents {
    std::vector<std::string> group_names;
    std::vector<std::vector<Component>> groups;  // F_r^1..F_r^{J_r}
    std::vector<Component> dependent;            // G^1..G^L
    std::vector<std::pair<int, double>> criterion_trace;
    std::vector<double> max_delta_trace;         // per outer iteration
    bool converged = false;
    int iterations = 0;
    double criterion = 0.0;
    std::vector<A0Run> a0_runs;

    /// All predictor scores, group by group, rank by rank.
    MatrixXd predictor_scores() const;
    std::vector<Index> counts() const;
};

/// Rank-one component per group for a single dependent variable (C4).
ModelComponents a1(const VectorXd& y, const std::vector<Block>& predictors, const Weights& w,
                   const ConvergenceOptions& opts, const StartValues& start = {});

/// Rank-one component per group for a dependent block (C5).
ModelComponents a2(const MatrixXd& y, const Metric& n, const std::vector<Block>& predictors,
                   const Weights& w, const ConvergenceOptions& opts, const StartValues& start = {});

/// J_r locally nested components per group (C5), followed by L dependent
/// components from redundancy analysis onto the retained span.
ModelComponents a3(const ThematicModel& model, const StartValues& start = {});

/// One component per group plus one dependent component co-determined on C6.
ModelComponents b1(const MatrixXd& y, const Metric& n, const std::vector<Block>& predictors,
                   const Weights& w, const ConvergenceOptions& opts, const StartValues& start = {});

/// Several components per group and L dependent components, alternating
/// C5 maximization against the current G-set and redundancy analysis.
ModelComponents b2(const ThematicModel& model, const StartValues& start = {});

/// G^1..G^L from redundancy analysis of (Y, N, P) onto all predictor scores.
std::vector<Component> dependent_components(const ModelComponents& mc, const MatrixXd& y,
                                            const Metric& n, Index l, const Weights& w,
                                            const std::string& y_id = "Y");

/// tr(Y N Y' P Pi_{basis})
double explained_trace(const MatrixXd& y, const MatrixXd& n_weights, const MatrixXd& basis,
                       const Weights& w);

/// C5(M) / C5(SM_r): ||F_r^{j_r}||^2_P times the ratio of explained traces
/// with and without the last component of group r. +inf when the sub-model
/// explains nothing.
double criterion_ratio(const ModelComponents& mc, const MatrixXd& y, const MatrixXd& n_weights,
                       const Weights& w, Index group);

enum class OmegaKind { inv_inertia, inv_lambda1 };

const char* to_string(OmegaKind kind);
OmegaKind omega_kind_from_string(const std::string& s);

/// Group weight making ||F||^2_P comparable across groups (bounded by 1
/// under inv_lambda1).
double omega(const Block& group, const Weights& w, OmegaKind kind);

struct SelectionStop {
    /// Per-group floor; selection ends when the arg-min group is at its floor.
    std::vector<Index> min_counts;
    /// Selection ends when the smallest score reaches this value.
    std::optional<double> score_threshold;
};

struct SelectionStep {
    int step = 0;
    Index group = 0;
    int removed_rank = 0;
    /// omega_r * criterion_ratio for every group (NaN when the group is empty).
    std::vector<double> scores;
    double refit_criterion = 0.0;
};

struct SelectionResult {
    std::vector<SelectionStep> steps;
    std::vector<Index> final_counts;
    /// Scores of the retained model when selection stopped.
    std::vector<double> final_scores;
    ModelComponents final_model;
};

/// Backward removal of predictor components: repeatedly drops the last
/// component of the group with the smallest weighted criterion ratio, then
/// refits A3 warm-started from the surviving components.
SelectionResult backward_select(const ThematicModel& model, const ModelComponents& mc,
                                OmegaKind kind, const SelectionStop& stop = {});

} // namespace seer

#pragma once

// Multiple covariance criteria and the quadratic-form machinery used to
// optimize them one component at a time.
//
// For a component F, a conditioning block Z and a dependent block (Y, N):
//
//   B = P Pi_{Z-perp}
//   A = tr(Y N Y' P Pi_Z) B + B Y N Y' B
//   C(F) = F'PF * F'AF / F'BF      (= ||F||^2_P tr(Y N Y' P Pi_{F,Z}))
//
// A and B are never stored as n x n matrices on the hot path; every product
// goes through the Z projector.

#include "seer/linalg.hpp"

#include <string>
#include <vector>

namespace seer {

class CriterionContext {
public:
    /// `y` is n x K, `n_weights` K x K symmetric positive definite, `z` n x S
    /// (possibly S = 0). Throws SingularBasis when Z is rank deficient.
    CriterionContext(MatrixXd y, const MatrixXd& n_weights, const MatrixXd& z, const Weights& w);

    /// Single dependent variable with unit weight.
    static CriterionContext single(const VectorXd& y, const MatrixXd& z, const Weights& w);

    const Weights& weights() const { return w_; }
    const MatrixXd& y() const { return y_; }
    const MatrixXd& n_weights() const { return n_; }
    const Projector& z_projector() const { return z_; }
    Index z_rank() const { return z_.rank(); }

    /// tr(Y N Y' P Pi_Z); zero when Z is empty.
    double trace_term() const { return trace_term_; }

    VectorXd apply_p(const VectorXd& f) const;
    VectorXd apply_b(const VectorXd& f) const;
    VectorXd apply_a(const VectorXd& f) const;

    double quad_p(const VectorXd& f) const { return w_.norm2(f); }
    double quad_b(const VectorXd& f) const;
    double quad_a(const VectorXd& f) const;

    /// F'PF * F'AF / F'BF; throws DegenerateComponent when F'BF <= 1e-14 F'PF.
    double criterion(const VectorXd& f) const;

    /// X'PX, X'AX and X'BX for a block of columns X.
    struct Sandwich {
        MatrixXd p, a, b;
    };
    Sandwich sandwich(const MatrixXd& x) const;

    /// Dense n x n forms, for inspection and tests.
    MatrixXd dense_a() const;
    MatrixXd dense_b() const;

private:
    MatrixXd y_;
    MatrixXd n_;
    Weights w_;
    Projector z_;
    double trace_term_ = 0.0;
};

CriterionContext build_context(const MatrixXd& y, const MatrixXd& n_weights, const MatrixXd& z,
                               const Weights& w);

struct BetaGamma {
    double beta = 0.0;
    double gamma = 0.0;
};

/// beta = F'AF / F'BF, gamma = F'PF / F'BF. Throws DegenerateComponent when
/// F'BF <= 1e-14.
BetaGamma beta_gamma(const VectorXd& f, const CriterionContext& ctx);

/// <F | y>_P
double c1(const VectorXd& f, const VectorXd& y, const Weights& w);

/// ||Pi_{<F>} y||^2_P * prod_r ||F_r||^2_P (columns of `f_list` are the F_r).
double c4(const VectorXd& y, const MatrixXd& f_list, const Weights& w);

/// tr(Y N Y' P Pi_{<F>}) * prod_r ||F_r||^2_P
double c5(const MatrixXd& y, const MatrixXd& n_weights, const MatrixXd& f_list, const Weights& w);

/// ||Pi_{<F>} G||^2_P * prod_r ||F_r||^2_P
double c6(const VectorXd& g, const MatrixXd& f_list, const Weights& w);

struct C6PartialMax {
    double value = 0.0;  // prod ||F_r||^2_P * eta
    double eta = 0.0;    // top eigenvalue of Y N Y' P Pi_{F,Z}
    VectorXd g;          // Y N v
    VectorXd v;          // v'Nv = 1
};

/// Best dependent component for fixed predictor components: maximizes C6
/// over G = YNv, v'Nv = 1, with projection on <F_list, Z>.
C6PartialMax c6_partial_max(const MatrixXd& f_list, const MatrixXd& y, const MatrixXd& n_weights,
                            const MatrixXd& z, const Weights& w);

/// ||Pi y||^2_P / ||y||^2_P
double r_squared(const VectorXd& y, const MatrixXd& regressors, const Weights& w);

struct RegressionTerm {
    double coefficient = 0.0;       // raw weighted-least-squares coefficient
    double std_coefficient = 0.0;   // coefficient * ||z_j||_P / ||y||_P
    double t_value = 0.0;
    double p_value = 1.0;
};

struct RegressionSummary {
    std::vector<RegressionTerm> terms;
    double r2 = 0.0;
    Index dof = 0;
};

/// Descriptive WLS t-tests of y on centered regressors (intercept absorbed
/// by centering, so dof = n - S - 1). Components are not exogenous, so these
/// are indicators rather than proper p-values.
RegressionSummary pseudo_pvalues(const VectorXd& y, const MatrixXd& regressors, const Weights& w);

/// "***" below 0.001, "**" below 0.01, "*" below 0.05, "" otherwise.
std::string significance_stars(double p_value);

} // namespace seer

#pragma once

// Single predictor group methods: PLS1, the rank-one solutions of the
// two-block covariance programs, deflation, maximal redundancy analysis
// and local-nesting PLS2.

#include "seer/linalg.hpp"

#include <string>
#include <utility>
#include <vector>

namespace seer {

/// A latent component of one group: score = X_k M u, with X_k the group
/// matrix after k = rank-1 deflations and u'Mu = 1.
struct Component {
    VectorXd score;
    VectorXd loading;
    std::string group_id;
    int rank = 1;
    double eigenvalue = 0.0;
};

/// Stacks component scores as columns.
MatrixXd scores_matrix(const std::vector<Component>& components);

/// Residuals of a group matrix after regression on the scores extracted so far.
class DeflationState {
public:
    DeflationState(MatrixXd original, Weights w);

    const MatrixXd& original() const { return original_; }
    const MatrixXd& residual() const { return residual_; }
    const std::vector<VectorXd>& extracted() const { return extracted_; }
    const Weights& weights() const { return w_; }

    /// Returns a new state whose residual is the original matrix regressed
    /// on every extracted score plus `f` (jointly). A score already in the
    /// extracted span leaves the state unchanged.
    DeflationState deflate(const VectorXd& f) const;

private:
    MatrixXd original_;
    MatrixXd residual_;
    std::vector<VectorXd> extracted_;
    Weights w_;
};

DeflationState deflate(const DeflationState& state, const VectorXd& f);

/// First PLS1 component of y on (X, M, P): u = X'Py / ||X'Py||_M, F = XMu.
/// Throws NullCovariance when ||X'Py||_M < 1e-14.
Component pls1_rank1(const MatrixXd& x, const Metric& m, const VectorXd& y, const Weights& w,
                     const std::string& group_id = "X");

struct Pls1Result {
    std::vector<Component> components;
    /// Set when a rank > 1 hit NullCovariance and the list was cut short.
    bool truncated = false;
};

/// K PLS1 components, each computed on X deflated by the previous scores
/// (the metric M is kept fixed). Throws NullCovariance at rank 1.
Pls1Result pls1(const MatrixXd& x, const Metric& m, const VectorXd& y, const Weights& w, Index k,
                const std::string& group_id = "X");

struct Q3Solution {
    Component f;
    Component g;
    double eta = 0.0;
};

/// Rank-one solution of max <XMu | YNv>_P subject to u'Mu = v'Nv = 1.
/// eta is the top eigenvalue of R_{X,M,P} R_{Y,N,P}; sqrt(eta) = <F|G>_P.
Q3Solution q3_rank1(const MatrixXd& x, const Metric& mx, const MatrixXd& y, const Metric& ny,
                    const Weights& w, const std::string& x_id = "X", const std::string& y_id = "Y");

/// X-side of q3_rank1: the F maximizing sum_k n_k <XMu | y^k>^2 (general N).
Component q2_rank1(const MatrixXd& x, const Metric& mx, const MatrixXd& y, const Metric& ny,
                   const Weights& w, const std::string& x_id = "X");

/// L components of (Y, N, P) maximally redundant with <F_basis>: each G^l
/// solves the two-block program between Y deflated on G^1..G^{l-1} and the
/// flattened span of F_basis.
std::vector<Component> mra_components(const MatrixXd& f_basis, const MatrixXd& y, const Metric& ny,
                                      Index l, const Weights& w, const std::string& y_id = "Y");

struct LnPls2Result {
    std::vector<Component> f;
    std::vector<Component> g;
};

/// How rank k > 1 of LN-PLS2 is chosen on the deflated X.
///  conditioned: maximizes the multiple covariance criterion of the model
///    made of the lower ranks plus the new one, i.e. the top eigenvector of
///    M X'P (tr(Y N Y' P Pi_lower) I + Y N Y') P X. This is what the
///    multi-group algorithm A3 reduces to with a single predictor group.
///  deflated: plain two-block program between deflated X and full Y.
/// Both agree at rank 1.
enum class Pls2Nesting { conditioned, deflated };

const char* to_string(Pls2Nesting nesting);
Pls2Nesting pls2_nesting_from_string(const std::string& s);

/// Local-nesting PLS2: Kx X-components by deflating X only, then Ky
/// Y-components by redundancy analysis onto the X-component span.
LnPls2Result ln_pls2(const MatrixXd& x, const Metric& mx, const MatrixXd& y, const Metric& ny,
                     Index kx, Index ky, const Weights& w, const std::string& x_id = "X",
                     const std::string& y_id = "Y", Pls2Nesting nesting = Pls2Nesting::conditioned);

} // namespace seer

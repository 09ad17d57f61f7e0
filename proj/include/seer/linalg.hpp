#pragma once

// Weighted-metric linear algebra on triplets (X, M, P): observation weights,
// centering, P-orthogonal projection, metric-constrained eigenproblems and
// weighted PCA.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace seer {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Relative threshold below which a Gram matrix is treated as singular.
inline constexpr double kSingularTol = 1e-12;

/// Positive observation weights summing to one (the diagonal of P).
class Weights {
public:
    /// Normalizes `p` to sum 1. Throws InvalidWeights on a non-positive or
    /// non-finite entry.
    explicit Weights(VectorXd p);

    static Weights uniform(Index n);

    Index size() const { return p_.size(); }
    const VectorXd& p() const { return p_; }

    /// x'Py
    double dot(const VectorXd& x, const VectorXd& y) const;
    /// x'Px
    double norm2(const VectorXd& x) const { return dot(x, x); }
    double norm(const VectorXd& x) const;
    /// A'PB
    MatrixXd cross(const MatrixXd& a, const MatrixXd& b) const;
    /// P-weighted column means.
    VectorXd means(const MatrixXd& x) const;

private:
    VectorXd p_;
};

/// Centered (and usually standardized) observation matrix with its weights.
struct WeightedDataset {
    MatrixXd x;
    Weights weights;
    std::vector<std::string> column_names;

    Index rows() const { return x.rows(); }
    Index cols() const { return x.cols(); }
};

enum class ScaleMode { center_only, center_scale };

/// Centers columns under P and, in center_scale mode, scales them to unit
/// P-variance. Throws ConstantColumn for a column with P-variance < 1e-14.
WeightedDataset standardize(const MatrixXd& raw, const Weights& w, ScaleMode mode,
                            std::vector<std::string> names = {});

/// X'PX
MatrixXd gram(const WeightedDataset& ds);
MatrixXd gram(const MatrixXd& x, const Weights& w);

/// Throws SingularBasis when the symmetric PSD matrix `g` has an eigenvalue
/// below kSingularTol times its largest. `what` names the offending block.
void check_nonsingular_gram(const MatrixXd& g, const std::string& what);

/// P-orthogonal projector onto the span of the columns of Z. Built once,
/// applied many times. An empty Z projects everything to zero.
class Projector {
public:
    Projector(const MatrixXd& z, const Weights& w, const std::string& what = "Z");

    Index rank() const { return q_.cols(); }
    bool empty() const { return q_.cols() == 0; }

    /// P-orthonormal basis of the span (Q'PQ = I).
    const MatrixXd& basis() const { return q_; }

    VectorXd fitted(const VectorXd& y) const;
    VectorXd residual(const VectorXd& y) const { return y - fitted(y); }
    MatrixXd fitted(const MatrixXd& y) const;
    MatrixXd residual(const MatrixXd& y) const { return y - fitted(y); }

    /// Coordinates of the projection of y on the original columns of Z.
    VectorXd coefficients(const VectorXd& y) const;

private:
    VectorXd p_;
    MatrixXd q_;     // n x S, P-orthonormal
    MatrixXd coef_;  // S x S, maps Q-coordinates to Z-coordinates
};

struct Projection {
    VectorXd fitted;
    VectorXd residual;
};

Projection project(const VectorXd& y, const MatrixXd& z, const Weights& w);

enum class MetricKind { identity, inverse_gram, block_inverse, custom };

const char* to_string(MetricKind kind);
MetricKind metric_kind_from_string(const std::string& s);

/// Symmetric positive definite column metric with its Cholesky factor.
class Metric {
public:
    /// Throws NotSymmetric / NotPositiveDefinite.
    Metric(MatrixXd m, MetricKind kind = MetricKind::custom);

    static Metric identity(Index j);

    const MatrixXd& matrix() const { return m_; }
    /// Lower-triangular L with M = L L'.
    const MatrixXd& chol() const { return l_; }
    MetricKind kind() const { return kind_; }
    Index size() const { return m_.rows(); }

    /// u'Mu
    double norm2(const VectorXd& u) const { return u.dot(m_ * u); }

private:
    MatrixXd m_;
    MatrixXd l_;
    MetricKind kind_;
};

/// Column partition for block_inverse metrics: each block lists column indices.
using Blocks = std::vector<std::vector<Index>>;

Metric make_metric(MetricKind kind, const WeightedDataset& ds, const Blocks& blocks = {});
Metric make_metric(MetricKind kind, const MatrixXd& x, const Weights& w,
                   const Blocks& blocks = {});

struct EigenPair {
    double value = 0.0;
    VectorXd vector;
};

/// Top-k solutions of S M u = lambda u with u'Mu = 1, via the symmetric
/// problem L'SL w = lambda w (M = LL'), u = L^{-T} w. Sorted by descending
/// value; the largest-magnitude entry of each u is positive.
std::vector<EigenPair> max_gen_eig(const MatrixXd& s, const Metric& m, Index k);

/// Flips `v` so that its largest-magnitude entry is positive (ties resolved
/// towards the lowest index).
void fix_sign(VectorXd& v);

struct PrincipalComponent {
    VectorXd score;    // F = XMu
    VectorXd loading;  // u, u'Mu = 1
    double eigenvalue = 0.0;
};

struct TripletPca {
    std::vector<PrincipalComponent> components;
    double total_inertia = 0.0;
};

/// PCA of the triplet (X, M, P).
TripletPca triplet_pca(const MatrixXd& x, const Metric& m, const Weights& w, Index k);
TripletPca triplet_pca(const WeightedDataset& ds, const Metric& m, Index k);

/// trace(M X'PX)
double total_inertia(const MatrixXd& x, const Metric& m, const Weights& w);

/// Largest eigenvalue of the PCA of (X, M, P).
double largest_eigenvalue(const MatrixXd& x, const Metric& m, const Weights& w);

/// Pearson correlation under P (both vectors are centered first).
double weighted_corr(const VectorXd& a, const VectorXd& b, const Weights& w);

/// x / ||x||_P
VectorXd standardized(const VectorXd& x, const Weights& w);

/// min over sign of ||st(a) -+ st(b)||_P
double aligned_distance(const VectorXd& a, const VectorXd& b, const Weights& w);

} // namespace seer

#pragma once

// Seeded instance generators, fixed small instances and independent oracles
// shared by the unit tests and the acceptance runner.

#include "seer/criteria.hpp"
#include "seer/linalg.hpp"
#include "seer/pls.hpp"
#include "seer/seer.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

namespace seer::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double normal() { return nd_(rng_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    MatrixXd normal(Index rows, Index cols) {
        MatrixXd m(rows, cols);
        for (Index j = 0; j < cols; ++j)
            for (Index i = 0; i < rows; ++i) m(i, j) = normal();
        return m;
    }

    VectorXd normal_vec(Index n) { return normal(n, 1).col(0); }

    Weights weights(Index n) {
        VectorXd p(n);
        for (Index i = 0; i < n; ++i) p(i) = uniform(0.5, 1.5);
        return Weights(p);
    }

    /// Well-conditioned symmetric positive definite matrix.
    MatrixXd spd(Index j) {
        const MatrixXd a = normal(j, j);
        return a * a.transpose() + 0.5 * MatrixXd::Identity(j, j);
    }

    /// Standardized n x j block under w.
    MatrixXd block(Index n, Index j, const Weights& w) {
        return standardize(normal(n, j), w, ScaleMode::center_scale).x;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> nd_;
};

/// Three mutually P-orthonormal centered vectors on four uniform observations.
struct OrthonormalTriple {
    Weights w = Weights::uniform(4);
    VectorXd x1 = (VectorXd(4) << 1, 1, -1, -1).finished();
    VectorXd x2 = (VectorXd(4) << 1, -1, 1, -1).finished();
    VectorXd z = (VectorXd(4) << 1, -1, -1, 1).finished();

    MatrixXd x12() const {
        MatrixXd x(4, 2);
        x << x1, x2;
        return x;
    }
};

/// OrthonormalTriple plus the dependent block [x1, z + eps x2, z + eps x2].
struct DivergenceInstance : OrthonormalTriple {
    double eps = 0.01;
    MatrixXd y() const {
        MatrixXd out(4, 3);
        const VectorXd v = z + eps * x2;
        out << x1, v, v;
        return out;
    }
};

inline MatrixXd hstack(const std::vector<VectorXd>& cols) {
    if (cols.empty()) return MatrixXd();
    MatrixXd out(cols.front().size(), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Index>(i)) = cols[i];
    return out;
}

/// Weighted Pearson correlation, written out from moments.
inline double corr(const VectorXd& a, const VectorXd& b, const Weights& w) {
    const VectorXd& p = w.p();
    const double ma = p.dot(a), mb = p.dot(b);
    const VectorXd da = a.array() - ma, db = b.array() - mb;
    return p.dot(da.cwiseProduct(db)) / std::sqrt(p.dot(da.cwiseProduct(da)) * p.dot(db.cwiseProduct(db)));
}

/// Orthogonal projection by the normal equations, independent of Projector.
inline VectorXd normal_eq_fit(const VectorXd& y, const MatrixXd& z, const Weights& w) {
    if (z.cols() == 0) return VectorXd::Zero(y.size());
    const MatrixXd zp = z.transpose() * w.p().asDiagonal();
    const VectorXd b = (zp * z).ldlt().solve(zp * y);
    return z * b;
}

/// Squared cosine between y and span(Z) under P.
inline double cos2(const VectorXd& y, const MatrixXd& z, const Weights& w) {
    const VectorXd f = normal_eq_fit(y, z, w);
    return w.norm2(f) / w.norm2(y);
}

/// Sum over dependent columns of n_k ||Pi y_k||^2 (diagonal N).
inline double explained(const MatrixXd& y, const VectorXd& n_diag, const MatrixXd& z, const Weights& w) {
    double s = 0.0;
    for (Index k = 0; k < y.cols(); ++k) s += n_diag(k) * w.norm2(normal_eq_fit(y.col(k), z, w));
    return s;
}

/// Independent C5: sum_k n_k ||Pi_F y_k||^2 * prod ||F_r||^2 (diagonal N).
inline double c5_direct(const MatrixXd& y, const VectorXd& n_diag, const MatrixXd& f, const Weights& w) {
    double prod = 1.0;
    for (Index r = 0; r < f.cols(); ++r) prod *= w.norm2(f.col(r));
    return explained(y, n_diag, f, w) * prod;
}

/// Largest canonical correlation between two blocks: top singular value of
/// the whitened cross-covariance.
inline double canonical_oracle(const MatrixXd& x, const MatrixXd& y, const Weights& w) {
    const MatrixXd sxx = x.transpose() * w.p().asDiagonal() * x;
    const MatrixXd syy = y.transpose() * w.p().asDiagonal() * y;
    const MatrixXd sxy = x.transpose() * w.p().asDiagonal() * y;
    Eigen::SelfAdjointEigenSolver<MatrixXd> ex(sxx), ey(syy);
    const MatrixXd k = ex.operatorInverseSqrt() * sxy * ey.operatorInverseSqrt();
    return Eigen::JacobiSVD<MatrixXd>(k).singularValues()(0);
}

/// Largest singular value of the cross-covariance X'PY.
inline double tucker_oracle(const MatrixXd& x, const MatrixXd& y, const Weights& w) {
    const MatrixXd sxy = x.transpose() * w.p().asDiagonal() * y;
    return Eigen::JacobiSVD<MatrixXd>(sxy).singularValues()(0);
}

/// Unit-M-norm loading at angle theta for a two-column group.
inline VectorXd circle_loading(const Metric& m, double theta) {
    const Eigen::Vector2d t(std::cos(theta), std::sin(theta));
    return m.chol().transpose().triangularView<Eigen::Upper>().solve(VectorXd(t));
}

/// Best criterion value over `points` angles of the unit M-circle.
inline double grid_max(const CriterionContext& ctx, const MatrixXd& x, const Metric& m, int points) {
    double best = -1.0;
    for (int i = 0; i < points; ++i) {
        const double theta = M_PI * 2.0 * i / points;
        const VectorXd f = x * (m.matrix() * circle_loading(m, theta));
        best = std::max(best, ctx.criterion(f));
    }
    return best;
}

/// Two-sided Student-t p-value by Simpson integration of the density.
inline double t_pvalue_oracle(double t, double dof) {
    const double a = std::abs(t);
    const double c = std::exp(std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2)) / std::sqrt(dof * M_PI);
    auto pdf = [&](double x) { return c * std::pow(1 + x * x / dof, -(dof + 1) / 2); };
    const int steps = 20000;
    const double h = a / steps;
    double s = pdf(0) + pdf(a);
    for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * pdf(i * h);
    const double half = s * h / 3.0;
    return 1.0 - 2.0 * half;
}

} // namespace seer::testing

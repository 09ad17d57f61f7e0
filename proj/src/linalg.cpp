#include "seer/linalg.hpp"

#include "seer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace seer {

Weights::Weights(VectorXd p) : p_(std::move(p)) {
    if (p_.size() == 0) throw InvalidWeights("empty weight vector");
    for (Index i = 0; i < p_.size(); ++i) {
        if (!std::isfinite(p_(i)) || p_(i) <= 0.0) {
            std::ostringstream os;
            os << "weight of observation " << i << " is " << p_(i) << " (must be > 0)";
            throw InvalidWeights(os.str());
        }
    }
    p_ /= p_.sum();
}

Weights Weights::uniform(Index n) { return Weights(VectorXd::Constant(n, 1.0)); }

double Weights::dot(const VectorXd& x, const VectorXd& y) const {
    return (x.array() * p_.array() * y.array()).sum();
}

double Weights::norm(const VectorXd& x) const { return std::sqrt(norm2(x)); }

MatrixXd Weights::cross(const MatrixXd& a, const MatrixXd& b) const {
    return a.transpose() * p_.asDiagonal() * b;
}

VectorXd Weights::means(const MatrixXd& x) const { return x.transpose() * p_; }

WeightedDataset standardize(const MatrixXd& raw, const Weights& w, ScaleMode mode,
                            std::vector<std::string> names) {
    if (raw.rows() < 2) throw std::invalid_argument("standardize: need at least 2 observations");
    if (raw.rows() != w.size()) throw std::invalid_argument("standardize: weight/row count mismatch");
    if (names.empty()) {
        for (Index j = 0; j < raw.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
    }
    if (static_cast<Index>(names.size()) != raw.cols())
        throw std::invalid_argument("standardize: name/column count mismatch");

    MatrixXd x = raw.rowwise() - w.means(raw).transpose();
    if (mode == ScaleMode::center_scale) {
        for (Index j = 0; j < x.cols(); ++j) {
            const double var = w.norm2(x.col(j));
            if (var < 1e-14) throw ConstantColumn(names[j]);
            x.col(j) /= std::sqrt(var);
        }
    }
    return WeightedDataset{std::move(x), w, std::move(names)};
}

MatrixXd gram(const MatrixXd& x, const Weights& w) {
    MatrixXd g = w.cross(x, x);
    return 0.5 * (g + g.transpose());
}

MatrixXd gram(const WeightedDataset& ds) { return gram(ds.x, ds.weights); }

void check_nonsingular_gram(const MatrixXd& g, const std::string& what) {
    if (g.rows() == 0) return;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(g, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    const double bottom = es.eigenvalues().minCoeff();
    if (!(top > 0.0) || bottom < kSingularTol * top) {
        std::ostringstream os;
        os << what << ": Gram matrix is singular (eigenvalue ratio " << (top > 0 ? bottom / top : 0.0)
           << " < " << kSingularTol << ")";
        throw SingularBasis(os.str());
    }
}

Projector::Projector(const MatrixXd& z, const Weights& w, const std::string& what)
    : p_(w.p()) {
    if (z.cols() > 0 && z.rows() != w.size())
        throw std::invalid_argument("Projector: row count mismatch");
    const Index n = w.size();
    if (z.cols() == 0) {
        q_.resize(n, 0);
        coef_.resize(0, 0);
        return;
    }
    check_nonsingular_gram(gram(z, w), what);

    const VectorXd sqrt_p = p_.array().sqrt();
    const MatrixXd a = sqrt_p.asDiagonal() * z;
    Eigen::HouseholderQR<MatrixXd> qr(a);
    const Index s = z.cols();
    MatrixXd thin_q = qr.householderQ() * MatrixXd::Identity(n, s);
    q_ = sqrt_p.cwiseInverse().asDiagonal() * thin_q;
    const MatrixXd r = qr.matrixQR().topLeftCorner(s, s).triangularView<Eigen::Upper>();
    coef_ = r.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(s, s));
}

VectorXd Projector::fitted(const VectorXd& y) const {
    if (empty()) return VectorXd::Zero(y.size());
    return q_ * (q_.transpose() * p_.cwiseProduct(y));
}

MatrixXd Projector::fitted(const MatrixXd& y) const {
    if (empty()) return MatrixXd::Zero(y.rows(), y.cols());
    return q_ * (q_.transpose() * p_.asDiagonal() * y);
}

VectorXd Projector::coefficients(const VectorXd& y) const {
    if (empty()) return VectorXd();
    return coef_ * (q_.transpose() * p_.cwiseProduct(y));
}

Projection project(const VectorXd& y, const MatrixXd& z, const Weights& w) {
    Projector proj(z, w);
    VectorXd fitted = proj.fitted(y);
    VectorXd residual = y - fitted;
    return {std::move(fitted), std::move(residual)};
}

const char* to_string(MetricKind kind) {
    switch (kind) {
    case MetricKind::identity: return "identity";
    case MetricKind::inverse_gram: return "inverse_gram";
    case MetricKind::block_inverse: return "block_inverse";
    case MetricKind::custom: return "custom";
    }
    return "custom";
}

MetricKind metric_kind_from_string(const std::string& s) {
    if (s == "identity") return MetricKind::identity;
    if (s == "inverse_gram") return MetricKind::inverse_gram;
    if (s == "block_inverse") return MetricKind::block_inverse;
    if (s == "custom") return MetricKind::custom;
    throw ConfigError("unknown metric kind '" + s + "'");
}

namespace {

double max_abs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

MatrixXd inverse_spd(const MatrixXd& g, const std::string& what) {
    check_nonsingular_gram(g, what);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(g);
    const VectorXd inv = es.eigenvalues().cwiseInverse();
    MatrixXd m = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (m + m.transpose());
}

} // namespace

Metric::Metric(MatrixXd m, MetricKind kind) : m_(std::move(m)), kind_(kind) {
    if (m_.rows() != m_.cols()) throw NotSymmetric("metric must be square");
    if (max_abs(m_ - m_.transpose()) > 1e-12 * std::max(1.0, max_abs(m_)))
        throw NotSymmetric("metric matrix is not symmetric");
    m_ = 0.5 * (m_ + m_.transpose());
    Eigen::LLT<MatrixXd> llt(m_);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("metric matrix is not positive definite");
    l_ = llt.matrixL();
}

Metric Metric::identity(Index j) { return Metric(MatrixXd::Identity(j, j), MetricKind::identity); }

Metric make_metric(MetricKind kind, const MatrixXd& x, const Weights& w, const Blocks& blocks) {
    const Index j = x.cols();
    switch (kind) {
    case MetricKind::identity:
        return Metric::identity(j);
    case MetricKind::inverse_gram:
        return Metric(inverse_spd(gram(x, w), "inverse_gram metric"), MetricKind::inverse_gram);
    case MetricKind::block_inverse: {
        std::vector<int> seen(static_cast<std::size_t>(j), 0);
        MatrixXd m = MatrixXd::Zero(j, j);
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const auto& cols = blocks[b];
            if (cols.empty()) throw std::invalid_argument("block_inverse: empty block");
            MatrixXd xb(x.rows(), static_cast<Index>(cols.size()));
            for (std::size_t c = 0; c < cols.size(); ++c) {
                if (cols[c] < 0 || cols[c] >= j)
                    throw std::invalid_argument("block_inverse: column index out of range");
                ++seen[static_cast<std::size_t>(cols[c])];
                xb.col(static_cast<Index>(c)) = x.col(cols[c]);
            }
            const MatrixXd inv = inverse_spd(gram(xb, w), "block " + std::to_string(b + 1));
            for (std::size_t r = 0; r < cols.size(); ++r)
                for (std::size_t c = 0; c < cols.size(); ++c)
                    m(cols[r], cols[c]) = inv(static_cast<Index>(r), static_cast<Index>(c));
        }
        if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; }))
            throw std::invalid_argument("block_inverse: blocks must partition the columns");
        return Metric(std::move(m), MetricKind::block_inverse);
    }
    case MetricKind::custom:
        break;
    }
    throw std::invalid_argument("make_metric: custom metrics are built from an explicit matrix");
}

Metric make_metric(MetricKind kind, const WeightedDataset& ds, const Blocks& blocks) {
    return make_metric(kind, ds.x, ds.weights, blocks);
}

void fix_sign(VectorXd& v) {
    if (v.size() == 0) return;
    const double top = v.cwiseAbs().maxCoeff();
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= top * (1.0 - 1e-12)) {
            if (v(i) < 0) v = -v;
            return;
        }
    }
}

std::vector<EigenPair> max_gen_eig(const MatrixXd& s, const Metric& m, Index k) {
    const Index j = m.size();
    if (s.rows() != j || s.cols() != j) throw std::invalid_argument("max_gen_eig: dimension mismatch");
    if (k < 0 || k > j) throw std::invalid_argument("max_gen_eig: k out of range");
    if (max_abs(s - s.transpose()) > 1e-10 * std::max(1.0, max_abs(s)))
        throw NotSymmetric("max_gen_eig: S is not symmetric");

    const MatrixXd& l = m.chol();
    MatrixXd c = l.transpose() * s * l;
    c = 0.5 * (c + c.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(c);

    std::vector<EigenPair> out;
    out.reserve(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) {
        const Index idx = j - 1 - i;
        VectorXd u = l.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors().col(idx));
        fix_sign(u);
        out.push_back({es.eigenvalues()(idx), std::move(u)});
    }
    return out;
}

double total_inertia(const MatrixXd& x, const Metric& m, const Weights& w) {
    return (m.matrix() * gram(x, w)).trace();
}

TripletPca triplet_pca(const MatrixXd& x, const Metric& m, const Weights& w, Index k) {
    if (k > x.cols()) throw std::invalid_argument("triplet_pca: k exceeds column count");
    const MatrixXd g = gram(x, w);
    TripletPca out;
    out.total_inertia = (m.matrix() * g).trace();
    for (auto& pair : max_gen_eig(g, m, k)) {
        VectorXd score = x * (m.matrix() * pair.vector);
        const double inertia = w.norm2(score);
        out.components.push_back({std::move(score), std::move(pair.vector), inertia});
    }
    return out;
}

TripletPca triplet_pca(const WeightedDataset& ds, const Metric& m, Index k) {
    return triplet_pca(ds.x, m, ds.weights, k);
}

double largest_eigenvalue(const MatrixXd& x, const Metric& m, const Weights& w) {
    return max_gen_eig(gram(x, w), m, 1).front().value;
}

double weighted_corr(const VectorXd& a, const VectorXd& b, const Weights& w) {
    const VectorXd ac = a.array() - w.p().dot(a);
    const VectorXd bc = b.array() - w.p().dot(b);
    const double na = w.norm(ac);
    const double nb = w.norm(bc);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(w.dot(ac, bc) / (na * nb), -1.0, 1.0);
}

VectorXd standardized(const VectorXd& x, const Weights& w) {
    const double n = w.norm(x);
    if (n == 0.0) return x;
    return x / n;
}

double aligned_distance(const VectorXd& a, const VectorXd& b, const Weights& w) {
    const VectorXd sa = standardized(a, w);
    const VectorXd sb = standardized(b, w);
    return std::min(w.norm(sa - sb), w.norm(sa + sb));
}

} // namespace seer

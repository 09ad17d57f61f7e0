#include "seer/pls.hpp"

#include "seer/errors.hpp"

#include <algorithm>
#include <cmath>

namespace seer {

MatrixXd scores_matrix(const std::vector<Component>& components) {
    if (components.empty()) return MatrixXd();
    MatrixXd out(components.front().score.size(), static_cast<Index>(components.size()));
    for (std::size_t i = 0; i < components.size(); ++i) out.col(static_cast<Index>(i)) = components[i].score;
    return out;
}

DeflationState::DeflationState(MatrixXd original, Weights w)
    : original_(std::move(original)), residual_(original_), w_(std::move(w)) {}

DeflationState DeflationState::deflate(const VectorXd& f) const {
    const double norm = w_.norm(f);
    if (!(norm > 0.0)) throw DegenerateComponent("cannot deflate on a zero score");

    std::vector<VectorXd> scores = extracted_;
    if (!scores.empty()) {
        MatrixXd basis(f.size(), static_cast<Index>(scores.size()));
        for (std::size_t i = 0; i < scores.size(); ++i) basis.col(static_cast<Index>(i)) = scores[i];
        const VectorXd rest = Projector(basis, w_).residual(f);
        if (w_.norm(rest) <= 1e-10 * norm) return *this;
    }
    scores.push_back(f);

    MatrixXd basis(f.size(), static_cast<Index>(scores.size()));
    for (std::size_t i = 0; i < scores.size(); ++i) basis.col(static_cast<Index>(i)) = scores[i];

    DeflationState next(*this);
    next.extracted_ = std::move(scores);
    next.residual_ = Projector(basis, w_, "extracted scores").residual(original_);
    return next;
}

DeflationState deflate(const DeflationState& state, const VectorXd& f) { return state.deflate(f); }

Component pls1_rank1(const MatrixXd& x, const Metric& m, const VectorXd& y, const Weights& w,
                     const std::string& group_id) {
    const VectorXd xpy = x.transpose() * w.p().cwiseProduct(y);
    const double lambda = std::sqrt(std::max(0.0, m.norm2(xpy)));
    if (lambda < 1e-14) throw NullCovariance("y is uncorrelated with group " + group_id);
    Component c;
    c.loading = xpy / lambda;
    c.score = x * (m.matrix() * c.loading);
    c.group_id = group_id;
    c.eigenvalue = lambda;
    return c;
}

Pls1Result pls1(const MatrixXd& x, const Metric& m, const VectorXd& y, const Weights& w, Index k,
                const std::string& group_id) {
    if (k > x.cols()) throw std::invalid_argument("pls1: more components than variables");
    Pls1Result out;
    DeflationState state(x, w);
    for (Index rank = 1; rank <= k; ++rank) {
        Component c;
        try {
            c = pls1_rank1(state.residual(), m, y, w, group_id);
        } catch (const NullCovariance&) {
            if (rank == 1) throw;
            out.truncated = true;
            break;
        }
        c.rank = static_cast<int>(rank);
        state = state.deflate(c.score);
        out.components.push_back(std::move(c));
    }
    return out;
}

Q3Solution q3_rank1(const MatrixXd& x, const Metric& mx, const MatrixXd& y, const Metric& ny,
                    const Weights& w, const std::string& x_id, const std::string& y_id) {
    const MatrixXd xpy = w.cross(x, y);
    MatrixXd s = xpy * ny.matrix() * xpy.transpose();
    s = 0.5 * (s + s.transpose());
    auto top = max_gen_eig(s, mx, 1).front();
    if (std::sqrt(std::max(0.0, top.value)) < 1e-14)
        throw NullCovariance("groups " + x_id + " and " + y_id + " have null cross-covariance");

    Q3Solution out;
    out.eta = top.value;
    out.f.loading = std::move(top.vector);
    out.f.score = x * (mx.matrix() * out.f.loading);
    out.f.group_id = x_id;
    out.f.eigenvalue = out.eta;

    const VectorXd ypf = y.transpose() * w.p().cwiseProduct(out.f.score);
    const double mu = std::sqrt(ny.norm2(ypf));
    out.g.loading = ypf / mu;
    out.g.score = y * (ny.matrix() * out.g.loading);
    out.g.group_id = y_id;
    out.g.eigenvalue = out.eta;
    return out;
}

Component q2_rank1(const MatrixXd& x, const Metric& mx, const MatrixXd& y, const Metric& ny,
                   const Weights& w, const std::string& x_id) {
    return q3_rank1(x, mx, y, ny, w, x_id).f;
}

std::vector<Component> mra_components(const MatrixXd& f_basis, const MatrixXd& y, const Metric& ny,
                                      Index l, const Weights& w, const std::string& y_id) {
    if (l > y.cols()) throw std::invalid_argument("mra_components: more components than variables");
    const Metric flat = make_metric(MetricKind::inverse_gram, f_basis, w);
    std::vector<Component> out;
    DeflationState state(y, w);
    for (Index rank = 1; rank <= l; ++rank) {
        Component g = q3_rank1(state.residual(), ny, f_basis, flat, w, y_id, "<F>").f;
        g.rank = static_cast<int>(rank);
        state = state.deflate(g.score);
        out.push_back(std::move(g));
    }
    return out;
}

const char* to_string(Pls2Nesting nesting) {
    return nesting == Pls2Nesting::conditioned ? "conditioned" : "deflated";
}

Pls2Nesting pls2_nesting_from_string(const std::string& s) {
    if (s == "conditioned") return Pls2Nesting::conditioned;
    if (s == "deflated") return Pls2Nesting::deflated;
    throw std::invalid_argument("unknown PLS2 nesting '" + s + "'");
}

LnPls2Result ln_pls2(const MatrixXd& x, const Metric& mx, const MatrixXd& y, const Metric& ny,
                     Index kx, Index ky, const Weights& w, const std::string& x_id,
                     const std::string& y_id, Pls2Nesting nesting) {
    if (kx > x.cols()) throw std::invalid_argument("ln_pls2: more X-components than variables");
    LnPls2Result out;
    DeflationState state(x, w);
    for (Index rank = 1; rank <= kx; ++rank) {
        Component f;
        if (nesting == Pls2Nesting::deflated || rank == 1) {
            f = q3_rank1(state.residual(), mx, y, ny, w, x_id, y_id).f;
        } else {
            // Y-variance already explained by the lower ranks rewards the
            // strength of the new component on top of its covariance with Y.
            const Projector lower(scores_matrix(out.f), w, "lower-rank components");
            const MatrixXd qy = lower.basis().transpose() * w.p().asDiagonal() * y;
            const double explained = (ny.matrix() * (qy.transpose() * qy)).trace();
            const MatrixXd& xd = state.residual();
            const MatrixXd xpy = w.cross(xd, y);
            MatrixXd s = explained * gram(xd, w) + xpy * ny.matrix() * xpy.transpose();
            s = 0.5 * (s + s.transpose());
            auto top = max_gen_eig(s, mx, 1).front();
            f.loading = std::move(top.vector);
            f.score = xd * (mx.matrix() * f.loading);
            if (!(w.norm(f.score) > 1e-14)) throw NullCovariance("group " + x_id + " is exhausted");
            f.group_id = x_id;
            f.eigenvalue = top.value;
        }
        f.rank = static_cast<int>(rank);
        state = state.deflate(f.score);
        out.f.push_back(std::move(f));
    }
    if (ky > 0) out.g = mra_components(scores_matrix(out.f), y, ny, ky, w, y_id);
    return out;
}

} // namespace seer

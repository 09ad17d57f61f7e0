#include "seer/criteria.hpp"

#include "seer/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace seer {

namespace {

double product_of_strengths(const MatrixXd& f_list, const Weights& w) {
    double prod = 1.0;
    for (Index r = 0; r < f_list.cols(); ++r) prod *= w.norm2(f_list.col(r));
    return prod;
}

MatrixXd validated_n(const MatrixXd& n_weights, Index k) {
    if (n_weights.rows() != k || n_weights.cols() != k)
        throw std::invalid_argument("dependent weight matrix N has the wrong size");
    return Metric(n_weights).matrix();
}

MatrixXd hcat(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out(std::max(a.rows(), b.rows()), a.cols() + b.cols());
    if (a.cols() > 0) out.leftCols(a.cols()) = a;
    if (b.cols() > 0) out.rightCols(b.cols()) = b;
    return out;
}

} // namespace

CriterionContext::CriterionContext(MatrixXd y, const MatrixXd& n_weights, const MatrixXd& z,
                                   const Weights& w)
    : y_(std::move(y)), n_(validated_n(n_weights, y_.cols())), w_(w), z_(z, w, "conditioning block") {
    if (y_.rows() != w.size()) throw std::invalid_argument("dependent block row count mismatch");
    if (!z_.empty()) {
        const MatrixXd qy = z_.basis().transpose() * w_.p().asDiagonal() * y_;
        trace_term_ = (n_ * (qy.transpose() * qy)).trace();
    }
}

CriterionContext CriterionContext::single(const VectorXd& y, const MatrixXd& z, const Weights& w) {
    return CriterionContext(MatrixXd(y), MatrixXd::Identity(1, 1), z, w);
}

CriterionContext build_context(const MatrixXd& y, const MatrixXd& n_weights, const MatrixXd& z,
                               const Weights& w) {
    return CriterionContext(y, n_weights, z, w);
}

VectorXd CriterionContext::apply_p(const VectorXd& f) const { return w_.p().cwiseProduct(f); }

VectorXd CriterionContext::apply_b(const VectorXd& f) const {
    return w_.p().cwiseProduct(z_.residual(f));
}

VectorXd CriterionContext::apply_a(const VectorXd& f) const {
    const VectorXd bf = apply_b(f);
    const VectorXd ybf = y_.transpose() * bf;
    return trace_term_ * bf + apply_b(y_ * (n_ * ybf));
}

double CriterionContext::quad_b(const VectorXd& f) const { return w_.norm2(z_.residual(f)); }

double CriterionContext::quad_a(const VectorXd& f) const {
    const VectorXd t = z_.residual(f);
    const VectorXd ybf = y_.transpose() * w_.p().cwiseProduct(t);
    return trace_term_ * w_.norm2(t) + ybf.dot(n_ * ybf);
}

double CriterionContext::criterion(const VectorXd& f) const {
    const double fpf = quad_p(f);
    const double fbf = quad_b(f);
    if (!(fbf > 1e-14 * fpf)) throw DegenerateComponent("component lies in the conditioning span");
    return fpf * quad_a(f) / fbf;
}

CriterionContext::Sandwich CriterionContext::sandwich(const MatrixXd& x) const {
    const MatrixXd r = z_.residual(x);
    Sandwich s;
    s.p = gram(x, w_);
    s.b = gram(r, w_);
    const MatrixXd ypr = w_.cross(y_, r);
    s.a = trace_term_ * s.b + ypr.transpose() * n_ * ypr;
    s.a = 0.5 * (s.a + s.a.transpose());
    return s;
}

MatrixXd CriterionContext::dense_b() const {
    MatrixXd b = w_.p().asDiagonal().toDenseMatrix();
    if (!z_.empty()) {
        const MatrixXd pq = w_.p().asDiagonal() * z_.basis();
        b -= pq * pq.transpose();
    }
    return b;
}

MatrixXd CriterionContext::dense_a() const {
    const MatrixXd b = dense_b();
    const MatrixXd by = b * y_;
    return trace_term_ * b + by * n_ * by.transpose();
}

BetaGamma beta_gamma(const VectorXd& f, const CriterionContext& ctx) {
    const double fbf = ctx.quad_b(f);
    if (!(fbf > 1e-14)) throw DegenerateComponent("F'BF <= 1e-14: component lies in the conditioning span");
    return {ctx.quad_a(f) / fbf, ctx.quad_p(f) / fbf};
}

double c1(const VectorXd& f, const VectorXd& y, const Weights& w) { return w.dot(f, y); }

double c4(const VectorXd& y, const MatrixXd& f_list, const Weights& w) {
    Projector proj(f_list, w, "component list");
    return w.norm2(proj.fitted(y)) * product_of_strengths(f_list, w);
}

double c5(const MatrixXd& y, const MatrixXd& n_weights, const MatrixXd& f_list, const Weights& w) {
    const MatrixXd n = validated_n(n_weights, y.cols());
    Projector proj(f_list, w, "component list");
    if (proj.empty()) return 0.0;
    const MatrixXd qy = proj.basis().transpose() * w.p().asDiagonal() * y;
    return (n * (qy.transpose() * qy)).trace() * product_of_strengths(f_list, w);
}

double c6(const VectorXd& g, const MatrixXd& f_list, const Weights& w) {
    Projector proj(f_list, w, "component list");
    return w.norm2(proj.fitted(g)) * product_of_strengths(f_list, w);
}

C6PartialMax c6_partial_max(const MatrixXd& f_list, const MatrixXd& y, const MatrixXd& n_weights,
                            const MatrixXd& z, const Weights& w) {
    const Metric n(validated_n(n_weights, y.cols()));
    Projector proj(hcat(f_list, z), w, "component list and conditioning block");
    const MatrixXd qy = proj.basis().transpose() * w.p().asDiagonal() * y;
    MatrixXd s = qy.transpose() * qy;
    s = 0.5 * (s + s.transpose());
    auto top = max_gen_eig(s, n, 1).front();
    C6PartialMax out;
    out.eta = top.value;
    out.v = top.vector;
    out.g = y * (n.matrix() * out.v);
    out.value = product_of_strengths(f_list, w) * out.eta;
    return out;
}

double r_squared(const VectorXd& y, const MatrixXd& regressors, const Weights& w) {
    const double yy = w.norm2(y);
    if (!(yy > 0.0)) throw DegenerateComponent("r_squared: y has zero norm");
    Projector proj(regressors, w, "regressors");
    return std::clamp(w.norm2(proj.fitted(y)) / yy, 0.0, 1.0);
}

RegressionSummary pseudo_pvalues(const VectorXd& y, const MatrixXd& regressors, const Weights& w) {
    const Index n = y.size();
    const Index s = regressors.cols();
    if (n <= s + 1) throw InsufficientDof("need more observations than regressors + 1");
    Projector proj(regressors, w, "regressors");
    const VectorXd coef = proj.coefficients(y);
    const VectorXd resid = y - regressors * coef;

    RegressionSummary out;
    out.dof = n - s - 1;
    const double yy = w.norm2(y);
    out.r2 = yy > 0.0 ? std::clamp(1.0 - w.norm2(resid) / yy, 0.0, 1.0) : 0.0;

    const double sigma2 = w.norm2(resid) / static_cast<double>(out.dof);
    Eigen::LDLT<MatrixXd> ldlt(gram(regressors, w));
    const MatrixXd cov = ldlt.solve(MatrixXd::Identity(s, s));
    const boost::math::students_t dist(static_cast<double>(out.dof));

    for (Index j = 0; j < s; ++j) {
        RegressionTerm term;
        term.coefficient = coef(j);
        term.std_coefficient = yy > 0.0 ? coef(j) * w.norm(regressors.col(j)) / std::sqrt(yy) : 0.0;
        const double se = std::sqrt(std::max(0.0, sigma2 * cov(j, j)));
        if (se > 0.0) {
            term.t_value = coef(j) / se;
            term.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(term.t_value)));
        } else {
            term.t_value = coef(j) == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), coef(j));
            term.p_value = coef(j) == 0.0 ? 1.0 : 0.0;
        }
        out.terms.push_back(term);
    }
    return out;
}

std::string significance_stars(double p_value) {
    if (p_value < 0.001) return "***";
    if (p_value < 0.01) return "**";
    if (p_value < 0.05) return "*";
    return "";
}

} // namespace seer

#include "ics/scatter.hpp"

#include <cmath>

namespace ics {

namespace {

constexpr int kChunk = 1024;

// (1/n) sum w2_i (x_i - xbar)(x_i - xbar)', accumulated chunk by chunk in a
// fixed order so results are bit-identical for a given chunk size. The
// identity-weight path runs the very same loop with w2 = nullptr, which is
// what makes cov_w with trivial weights equal the plain covariance exactly.
Eigen::MatrixXd weighted_scatter(const Eigen::MatrixXd& x, const Eigen::VectorXd* w2) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    const Eigen::VectorXd mean = empirical_mean(x);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
    for (int start = 0; start < n; start += kChunk) {
        const int len = std::min(kChunk, n - start);
        Eigen::MatrixXd centered = x.middleRows(start, len).rowwise() - mean.transpose();
        Eigen::MatrixXd chunk(p, p);
        if (w2) {
            chunk.noalias() =
                centered.transpose() * w2->segment(start, len).asDiagonal() * centered;
        } else {
            chunk.noalias() = centered.transpose() * centered;
        }
        acc += chunk;
    }
    // Symmetrize away the last bits of rounding so downstream symmetric
    // eigensolvers never see an asymmetry.
    acc = ((acc + acc.transpose()) * 0.5).eval();
    return acc / static_cast<double>(n);
}

} // namespace

double WeightFunction::squared(double d, int p) const {
    switch (kind) {
        case Kind::identity:
            return 1.0;
        case Kind::cov4:
            if (p <= 0)
                throw InvalidArgument("cov4 weight needs the ambient dimension p at evaluation");
            return d * d / static_cast<double>(p + 2);
        case Kind::custom: {
            if (!fn) throw InvalidArgument("custom weight function is empty");
            const double w = fn(d);
            return w * w;
        }
    }
    throw InvalidArgument("unknown weight kind");
}

std::string WeightFunction::name() const {
    switch (kind) {
        case Kind::identity: return "identity";
        case Kind::cov4: return "cov4";
        case Kind::custom: return "custom";
    }
    return "unknown";
}

CoordinateSample::CoordinateSample(Eigen::MatrixXd x, GramBasis b)
    : coords(std::move(x)), basis(std::move(b)) {
    if (coords.cols() != basis.dim())
        throw DimensionError("CoordinateSample: coords have " + std::to_string(coords.cols()) +
                             " columns but the basis has dimension " +
                             std::to_string(basis.dim()));
    if (coords.rows() < 2)
        throw DimensionError("CoordinateSample: need at least 2 observations");
}

Eigen::VectorXd empirical_mean(const Eigen::MatrixXd& coords) {
    if (coords.rows() < 1) throw DimensionError("empirical_mean: empty sample");
    return coords.colwise().mean();
}

Eigen::MatrixXd empirical_cov(const Eigen::MatrixXd& coords) {
    if (coords.rows() < 2) throw DimensionError("empirical_cov: need at least 2 observations");
    return weighted_scatter(coords, nullptr);
}

Eigen::VectorXd mahalanobis_norms(const Eigen::MatrixXd& coords, const SpdOptions& opt) {
    const Eigen::MatrixXd cov = empirical_cov(coords);
    const Eigen::MatrixXd w = spd_inv_sqrt(cov, opt);  // conditioning error if singular
    const Eigen::VectorXd mean = empirical_mean(coords);
    const Eigen::MatrixXd whitened = (coords.rowwise() - mean.transpose()) * w;
    return whitened.rowwise().norm();
}

Eigen::MatrixXd empirical_cov_w(const Eigen::MatrixXd& coords, const WeightFunction& w,
                                const SpdOptions& opt) {
    if (coords.rows() < 2) throw DimensionError("empirical_cov_w: need at least 2 observations");
    if (w.kind == WeightFunction::Kind::identity) return weighted_scatter(coords, nullptr);

    const int p = static_cast<int>(coords.cols());
    const Eigen::VectorXd d = mahalanobis_norms(coords, opt);
    Eigen::VectorXd w2(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) w2(i) = w.squared(d(i), p);
    return weighted_scatter(coords, &w2);
}

} // namespace ics

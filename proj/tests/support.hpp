#pragma once

// Shared helpers for the unit and acceptance suites: seeded random matrices,
// column comparisons that ignore the sign/permutation freedom of ICS
// eigenobjects, and an independent evaluation of the ICS defining relations.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ics/ics_core.hpp"
#include "ics/rng.hpp"

namespace testsup {

// Haar-ish orthogonal matrix: QR of a Gaussian matrix with sign fixing.
inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& gen, int p) {
    Eigen::MatrixXd a = ics::normal_matrix(gen, p, p);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < p; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
}

// SPD matrix with eigenvalues uniform in [lo, hi].
inline Eigen::MatrixXd random_spd(std::mt19937_64& gen, int p, double lo = 0.5, double hi = 3.0) {
    Eigen::MatrixXd q = random_orthogonal(gen, p);
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd d(p);
    for (int j = 0; j < p; ++j) d(j) = u(gen);
    Eigen::MatrixXd m = q * d.asDiagonal() * q.transpose();
    return 0.5 * (m + m.transpose());
}

// Invertible matrix with singular values in [0.5, 2].
inline Eigen::MatrixXd random_nonsingular(std::mt19937_64& gen, int p) {
    Eigen::MatrixXd u = random_orthogonal(gen, p);
    Eigen::MatrixXd v = random_orthogonal(gen, p);
    std::uniform_real_distribution<double> s(0.5, 2.0);
    Eigen::VectorXd d(p);
    for (int j = 0; j < p; ++j) d(j) = s(gen);
    return u * d.asDiagonal() * v.transpose();
}

inline double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    Eigen::VectorXd xc = x.array() - x.mean();
    Eigen::VectorXd yc = y.array() - y.mean();
    const double den = xc.norm() * yc.norm();
    return den > 0 ? xc.dot(yc) / den : 0.0;
}

// Worst column distance between a and b when each column may flip sign.
inline double max_column_diff_up_to_sign(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double worst = 0.0;
    for (int j = 0; j < a.cols(); ++j) {
        const double d = std::min((a.col(j) - b.col(j)).norm(), (a.col(j) + b.col(j)).norm());
        worst = std::max(worst, d);
    }
    return worst;
}

// Worst column distance when columns may also be permuted (greedy bijective
// matching; adequate because tolerances are far below column separations).
inline double max_column_diff_up_to_sign_perm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const int p = static_cast<int>(a.cols());
    std::vector<bool> used(static_cast<std::size_t>(p), false);
    double worst = 0.0;
    for (int j = 0; j < p; ++j) {
        double best = std::numeric_limits<double>::infinity();
        int best_k = -1;
        for (int k = 0; k < p; ++k) {
            if (used[static_cast<std::size_t>(k)]) continue;
            const double d =
                std::min((a.col(j) - b.col(k)).norm(), (a.col(j) + b.col(k)).norm());
            if (d < best) {
                best = d;
                best_k = k;
            }
        }
        used[static_cast<std::size_t>(best_k)] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

// Distance between the column spans of a and b (orthogonal projector gap).
inline double span_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    auto projector = [](const Eigen::MatrixXd& m) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
        Eigen::MatrixXd q =
            qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
        return Eigen::MatrixXd(q * q.transpose());
    };
    return (projector(a) - projector(b)).norm();
}

inline double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double truncnorm_pdf(double x, double a, double b) {
    const double mass = std_normal_cdf(b) - std_normal_cdf(a);
    return (x < a || x > b) ? 0.0 : std_normal_pdf(x) / mass;
}

// Rejection sampling of the standard normal truncated to (a, b).
inline Eigen::VectorXd truncnorm_sample(std::mt19937_64& gen, int n, double a, double b) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXd out(n);
    int got = 0;
    while (got < n) {
        const double x = nd(gen);
        if (x > a && x < b) out(got++) = x;
    }
    return out;
}

inline double quantile_of(std::vector<double> v, double level) {
    std::sort(v.begin(), v.end());
    const double h = level * (static_cast<double>(v.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]);
}

// Independent check of the ICS defining relations: the weighted second
// moments of the invariant coordinates, with Mahalanobis norms recomputed
// from scratch on the raw coordinates (they agree with the Gram-metric norms
// because Mahalanobis distances are affine invariant). Returns the largest
// absolute deviation of <S1 h_j, h_k> from the identity and of
// <S2 h_j, h_k> from diag(spectrum).
struct RelationResiduals {
    double s1 = 0.0;
    double s2 = 0.0;
};

inline Eigen::VectorXd mahalanobis_from_scratch(const Eigen::MatrixXd& coords) {
    const Eigen::RowVectorXd mean = coords.colwise().mean();
    const Eigen::MatrixXd c = coords.rowwise() - mean;
    const Eigen::MatrixXd cov = (c.transpose() * c) / static_cast<double>(coords.rows());
    const Eigen::MatrixXd solved = cov.ldlt().solve(c.transpose());
    return (c.array() * solved.transpose().array()).rowwise().sum().sqrt();
}

inline RelationResiduals relation_residuals(const Eigen::MatrixXd& coords,
                                            const Eigen::MatrixXd& gram,
                                            const ics::ICSSolution& sol,
                                            const ics::WeightFunction& w1,
                                            const ics::WeightFunction& w2) {
    const int n = static_cast<int>(coords.rows());
    const int p = static_cast<int>(coords.cols());
    const Eigen::VectorXd d = mahalanobis_from_scratch(coords);
    const Eigen::RowVectorXd mean = coords.colwise().mean();
    const Eigen::MatrixXd c = coords.rowwise() - mean;
    const Eigen::MatrixXd z = c * gram * sol.eigenbasis_coords;
    Eigen::VectorXd w1sq(n), w2sq(n);
    for (int i = 0; i < n; ++i) {
        w1sq(i) = w1.squared(d(i), p);
        w2sq(i) = w2.squared(d(i), p);
    }
    const Eigen::MatrixXd s1 =
        z.transpose() * w1sq.asDiagonal() * z / static_cast<double>(n);
    const Eigen::MatrixXd s2 =
        z.transpose() * w2sq.asDiagonal() * z / static_cast<double>(n);
    RelationResiduals r;
    r.s1 = (s1 - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff();
    r.s2 = (s2 - Eigen::MatrixXd(sol.spectrum.asDiagonal())).cwiseAbs().maxCoeff();
    return r;
}

// <S_w h, h> for an arbitrary direction h, same first-principles evaluation.
inline double weighted_quadratic_form(const Eigen::MatrixXd& coords,
                                      const Eigen::MatrixXd& gram,
                                      const Eigen::VectorXd& h,
                                      const ics::WeightFunction& w) {
    const int n = static_cast<int>(coords.rows());
    const int p = static_cast<int>(coords.cols());
    const Eigen::VectorXd d = mahalanobis_from_scratch(coords);
    const Eigen::RowVectorXd mean = coords.colwise().mean();
    const Eigen::MatrixXd c = coords.rowwise() - mean;
    const Eigen::VectorXd z = c * gram * h;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += w.squared(d(i), p) * z(i) * z(i);
    return acc / static_cast<double>(n);
}

} // namespace testsup

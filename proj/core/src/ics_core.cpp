#include "ics/ics_core.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "ics/errors.hpp"

namespace ics {

namespace {

double sample_skewness(const Eigen::VectorXd& z) {
    const double n = static_cast<double>(z.size());
    const double mean = z.mean();
    const Eigen::ArrayXd centered = z.array() - mean;
    const double m2 = centered.square().mean();
    const double m3 = centered.cube().mean();
    if (m2 <= 0.0) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

// Orient a column in place: positive skewness of its scores, falling back to
// a positive largest-magnitude coordinate entry when the skewness is
// numerically zero.
void orient_column(Eigen::Ref<Eigen::MatrixXd> directions, Eigen::Ref<Eigen::MatrixXd> scores,
                   int j) {
    constexpr double kSkewTie = 1e-12;
    const double skew = sample_skewness(scores.col(j));
    double sign = 0.0;
    if (std::abs(skew) > kSkewTie) {
        sign = skew > 0.0 ? 1.0 : -1.0;
    } else {
        Eigen::Index at = 0;
        directions.col(j).cwiseAbs().maxCoeff(&at);
        const double entry = directions(at, j);
        sign = entry >= 0.0 ? 1.0 : -1.0;
    }
    if (sign < 0.0) {
        directions.col(j) = -directions.col(j);
        scores.col(j) = -scores.col(j);
    }
}

} // namespace

ICSSolution solve_ics(const CoordinateSample& sample, const WeightFunction& w1,
                      const WeightFunction& w2, const SpdOptions& opt) {
    const int n = sample.n();
    const int p = sample.p();
    if (n <= p)
        throw DimensionError("solve_ics: need more observations than the space dimension (n = " +
                             std::to_string(n) + ", p = " + std::to_string(p) + ")");

    // Gram reduction: on Y_i = G_B [x_i]_B the multivariate two-scatter
    // problem has exactly the coordinate expressions of the coordinate-free
    // one, so its eigenvector columns are the [h_j]_B and its scores are the
    // invariant coordinates. No square root of G is ever needed.
    const Eigen::MatrixXd y = sample.coords * sample.basis.gram;
    const Eigen::VectorXd y_mean = empirical_mean(y);

    const Eigen::MatrixXd s1 = empirical_cov_w(y, w1, opt);
    const Eigen::MatrixXd whitener = spd_inv_sqrt(s1, opt);
    const Eigen::MatrixXd y_white = (y.rowwise() - y_mean.transpose()) * whitener;

    // The second scatter sees the whitened sample and draws its weights from
    // that sample's own covariance; this is what makes the spectrum exactly
    // invariant under affine changes of the data.
    const Eigen::MatrixXd s2 = empirical_cov_w(y_white, w2, opt);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s2);
    if (eig.info() != Eigen::Success)
        throw ConditioningError("solve_ics: eigendecomposition of the second scatter failed", 0.0,
                                0.0);
    // Eigen returns ascending order; the convention here is non-increasing.
    Eigen::VectorXd spectrum = eig.eigenvalues().reverse();
    Eigen::MatrixXd u = eig.eigenvectors().rowwise().reverse();

    const double lo = spectrum(p - 1);
    const double hi = spectrum(0);
    if (!(lo > 0.0) || lo <= opt.pd_threshold * hi)
        throw ConditioningError(
            "solve_ics: second scatter is numerically singular in the first-scatter geometry "
            "(smallest eigenvalue " +
                std::to_string(lo) + ", largest " + std::to_string(hi) + ")",
            lo, hi);

    ICSSolution sol{sample.basis,
                    empirical_mean(sample.coords),
                    whitener * u,
                    Eigen::MatrixXd(),
                    std::move(spectrum),
                    y_white * u,
                    w1.name(),
                    w2.name()};
    for (int j = 0; j < p; ++j) orient_column(sol.eigenbasis_coords, sol.scores, j);
    sol.dual_coords = dual_basis(sol.eigenbasis_coords, sol.basis);
    return sol;
}

Eigen::MatrixXd invariant_coordinates(const CoordinateSample& sample,
                                      const ICSSolution& solution) {
    if (!sample.basis.same_space(solution.basis))
        throw InvalidArgument(
            "invariant_coordinates: sample basis does not match the solution basis");
    const Eigen::MatrixXd centered =
        sample.coords.rowwise() - solution.mean_coords.transpose();
    return centered * sample.basis.gram * solution.eigenbasis_coords;
}

Eigen::MatrixXd dual_basis(const Eigen::MatrixXd& eigenbasis_coords, const GramBasis& basis) {
    if (eigenbasis_coords.rows() != basis.dim() || eigenbasis_coords.cols() != basis.dim())
        throw DimensionError("dual_basis: coordinate matrix does not match the basis dimension");
    // [H*]_B = ([H]_B' G_B)^{-1}: columns pair with the eigenbasis to the
    // identity, <h_j, h*_k> = delta_jk.
    const Eigen::MatrixXd a = eigenbasis_coords.transpose() * basis.gram;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
        throw ConditioningError("dual_basis: eigenbasis is numerically rank-deficient", 0.0, 0.0);
    return lu.inverse();
}

Eigen::VectorXd reconstruct(const ICSSolution& solution, const Eigen::VectorXd& scores_row,
                            const std::vector<int>& keep) {
    const int p = static_cast<int>(solution.eigenbasis_coords.rows());
    if (scores_row.size() != p)
        throw DimensionError("reconstruct: score vector length does not match the dimension");
    Eigen::VectorXd out = solution.mean_coords;
    for (int j : keep) {
        if (j < 0 || j >= p)
            throw InvalidArgument("reconstruct: component index " + std::to_string(j) +
                                  " out of range");
        out += scores_row(j) * solution.dual_coords.col(j);
    }
    return out;
}

} // namespace ics

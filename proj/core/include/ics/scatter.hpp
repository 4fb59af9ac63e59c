#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "ics/eucspace.hpp"

namespace ics {

// Weight applied to an observation's Mahalanobis norm d_i inside the
// weighted covariance. identity recovers the plain covariance; cov4
// (w(x) = x / sqrt(p+2)) gives the normalized fourth-moment operator whose
// population value equals the covariance for Gaussian data.
struct WeightFunction {
    enum class Kind { identity, cov4, custom };

    Kind kind = Kind::identity;
    std::function<double(double)> fn;  // only used for Kind::custom

    static WeightFunction identity() { return {Kind::identity, nullptr}; }
    static WeightFunction cov4() { return {Kind::cov4, nullptr}; }
    static WeightFunction custom(std::function<double(double)> f) {
        return {Kind::custom, std::move(f)};
    }

    // w(d)^2 for Mahalanobis norm d in ambient dimension p.
    double squared(double d, int p) const;

    std::string name() const;
};

// n observations given as coordinate rows in a declared basis.
struct CoordinateSample {
    Eigen::MatrixXd coords;  // n x p, row i = [x_i]_B
    GramBasis basis;

    CoordinateSample(Eigen::MatrixXd x, GramBasis b);

    int n() const { return static_cast<int>(coords.rows()); }
    int p() const { return static_cast<int>(coords.cols()); }
};

// Arithmetic mean of rows. Requires n >= 1.
Eigen::VectorXd empirical_mean(const Eigen::MatrixXd& coords);

// Raw-coordinate covariance (1/n)*sum (x_i - xbar)(x_i - xbar)'. The 1/n
// divisor keeps empirical spectra consistent with population formulas.
// A singular result is returned as-is; metric transport (Gram factors) is
// the caller's responsibility.
Eigen::MatrixXd empirical_cov(const Eigen::MatrixXd& coords);

// Weighted covariance (1/n)*sum w(d_i)^2 (x_i - xbar)(x_i - xbar)' with
// d_i = ||Cov^{-1/2}(x_i - xbar)|| measured in the raw-coordinate metric.
// identity weights reproduce empirical_cov through the same accumulation
// path, hence bitwise-exactly.
Eigen::MatrixXd empirical_cov_w(const Eigen::MatrixXd& coords, const WeightFunction& w,
                                const SpdOptions& opt = {});

inline Eigen::VectorXd empirical_mean(const CoordinateSample& s) {
    return empirical_mean(s.coords);
}
inline Eigen::MatrixXd empirical_cov(const CoordinateSample& s) {
    return empirical_cov(s.coords);
}
inline Eigen::MatrixXd empirical_cov_w(const CoordinateSample& s, const WeightFunction& w,
                                       const SpdOptions& opt = {}) {
    return empirical_cov_w(s.coords, w, opt);
}

// Mahalanobis norms d_i of every row in the raw-coordinate metric.
Eigen::VectorXd mahalanobis_norms(const Eigen::MatrixXd& coords, const SpdOptions& opt = {});

} // namespace ics

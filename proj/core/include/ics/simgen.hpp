#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ics/outlier.hpp"

namespace ics {

// Density-data generating schemes with a small planted-outlier fraction.
struct SchemeConfig {
    enum class Scheme { gp_clr, gp_margin, gumbel };

    Scheme scheme = Scheme::gp_clr;
    int n = 200;
    int grid_size = 100;
    double outlier_rate = 0.02;
    std::uint64_t seed = 0;

    // Gaussian-process settings (gp_clr, gp_margin): zero-mean paths with
    // covariance variance * exp(-|s-t| / range) on (0,1).
    double gp_range = 0.1;
    double gp_variance = 1.0;

    // gp_clr outliers: mean shifted by a fixed smooth bump, a Gaussian
    // envelope times a cosine. The oscillation concentrates the shift at
    // frequencies where the exponential kernel carries little noise power,
    // which is what makes a shift of this amplitude detectable.
    double bump_amplitude = 2.0;
    double bump_center = 0.5;
    double bump_width = 0.15;
    double bump_frequency = 6.0;

    // gp_margin outliers: path variance inflated by this factor.
    double margin_variance_factor = 4.0;

    // Gumbel scheme: (location mu, scale beta) drawn per unit from a
    // two-component bivariate Gaussian mixture; outliers are location-shifted.
    Eigen::Vector2d gumbel_inlier_mean{0.45, 0.08};
    Eigen::Vector2d gumbel_outlier_mean{0.65, 0.08};
    double gumbel_param_variance = 1e-4;  // diagonal covariance entry
    double gumbel_beta_floor = 1e-3;

    // Downstream smoothing space for the benchmark pipeline.
    int spline_degree = 4;
    int spline_knots = 0;     // 0 = scheme default (gp_clr 12, gumbel 6, gp_margin 6)
    double mpl_lambda = 1e-4; // gp_margin route
    double grid_lambda_s = 0.0;  // grid-scheme smoothing penalty

    static SchemeConfig make(Scheme s, std::uint64_t seed = 0);

    int effective_knots() const;
    std::string scheme_name() const;
};

// Density-valued sample on a shared grid plus the planted labels.
struct GridSample {
    Eigen::VectorXd t;           // grid over (0,1)
    Eigen::MatrixXd densities;   // n x grid_size, each row positive, integral 1
    std::vector<bool> labels;
};

// Raw-sample-valued units (each unit is an unordered set of scalar values).
struct RawSample {
    std::vector<Eigen::VectorXd> values;
    std::vector<bool> labels;
};

// Mean-shift mixture of GP paths, centered per path, pushed through the
// inverse clr map.
GridSample gen_gp_clr(const SchemeConfig& config);

// Covariance-shift mixture of GP paths; the time axis is discarded and each
// path's values form one unit's raw sample (a marginal-distribution view).
RawSample gen_gp_margin(const SchemeConfig& config);

// Gumbel densities (1/beta) exp(-(z + e^{-z})), z = (t-mu)/beta, with
// per-unit parameters from the bivariate mixture, renormalized on the grid
// interval.
GridSample gen_gumbel(const SchemeConfig& config);

// ROC over the number of predicted positives PP = 0..n (sorted by
// decreasing score, ties broken by original order) and the trapezoid AUC.
struct RocResult {
    Eigen::VectorXd tpr;  // length n+1, non-decreasing
    Eigen::VectorXd fpr;  // length n+1, non-decreasing
    double auc = 0.0;
};

RocResult roc_auc(const Eigen::VectorXd& scores, const std::vector<bool>& labels);

struct BenchmarkOptions {
    int n_reps = 200;
    int threads = 1;
    SelectionMode selection = SelectionMode::dagostino();
    SpdOptions spd;
    double max_failure_rate = 0.05;  // aborts above this
};

struct SchemeBenchmark {
    std::string scheme;
    int n_reps = 0;
    int failures = 0;
    Eigen::VectorXd tpr_mean;       // pointwise over PP
    Eigen::VectorXd fpr_mean;
    Eigen::VectorXd tpr_halfwidth;  // 1.96 * sd / sqrt(#successful reps)
    double auc_mean = 0.0;
    double auc_sd = 0.0;
};

// Per scheme: n_reps independent datasets (substreams of the scheme seed),
// the density ICS pipeline's squared distances as scores with automatic
// component selection (floored at one component), per-replicate ROC, and
// pointwise averages with normal-quantile confidence halfwidths.
std::vector<SchemeBenchmark> run_benchmark(const std::vector<SchemeConfig>& schemes,
                                           const BenchmarkOptions& opt = {});

void write_roc_csv(const std::string& path, const std::vector<SchemeBenchmark>& results);
void write_auc_csv(const std::string& path, const std::vector<SchemeBenchmark>& results);

} // namespace ics

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ics/bayes_spline.hpp"
#include "ics/mpl.hpp"

namespace ics {

// Shared preprocessing routes used by both the CLI and the benchmark
// harness, so results agree between the two entry points.

// Grid densities -> spline densities: floor, clr on the grid, penalized
// least squares in one shared space. The least-squares factorization is done
// once for the whole sample.
std::vector<DensitySpline> smooth_grid_sample(const Eigen::VectorXd& t,
                                              const Eigen::MatrixXd& densities,
                                              const SplineSpaceSpec& spec,
                                              double lambda_s = 0.0);

struct MplRouteOptions {
    int degree = 4;
    int knots = 6;
    KnotPlacement placement = KnotPlacement::quantile;
    double lambda = 1e-4;
    int penalty_order = 3;
    int max_iter = 100;
    // Interval: explicit bounds, else the pooled range padded per side by
    // pad_fraction of its width.
    std::optional<std::pair<double, double>> interval;
    double pad_fraction = 0.01;
    int threads = 1;
};

struct MplRouteResult {
    SplineSpaceSpec spec;
    std::vector<DensitySpline> densities;   // one per successful unit, in order
    std::vector<MPLReport> reports;         // parallel to input units
    std::vector<std::string> unit_errors;   // empty string = success
    bool all_ok() const;
};

// Raw per-unit samples -> spline densities via the penalized-likelihood fit
// in one shared space (quantile or equally spaced knots from the pooled
// sample). Units fail independently.
MplRouteResult smooth_raw_units(const std::vector<Eigen::VectorXd>& units,
                                const MplRouteOptions& opt);

} // namespace ics

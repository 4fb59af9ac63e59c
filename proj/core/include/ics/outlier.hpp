#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ics/bayes_spline.hpp"
#include "ics/ics_core.hpp"
#include "ics/mpl.hpp"

namespace ics {

// How many leading invariant components enter the outlier distance.
struct SelectionMode {
    enum class Kind { fixed, scree_data, dagostino };

    Kind kind = Kind::dagostino;
    int fixed_kappa = 0;
    double level = 0.05;

    static SelectionMode fixed(int kappa) { return {Kind::fixed, kappa, 0.0}; }
    static SelectionMode dagostino(double level = 0.05) { return {Kind::dagostino, 0, level}; }
    static SelectionMode scree() { return {Kind::scree_data, 0, 0.0}; }

    std::string name() const;
};

struct SelectionResult {
    int kappa = 0;             // 0 means no component rejected normality
    bool no_structure = false;
    std::vector<double> pvalues;  // one per tested component (empty for fixed)
};

// Squared ICS distances sum_{j<kappa} z_ji^2 (leading components). With
// kappa = p this is the squared Mahalanobis distance under the 1/n
// covariance convention.
Eigen::VectorXd ics_distance(const Eigen::MatrixXd& scores, int kappa);

// Omnibus normality p-value: skewness and kurtosis transforms to Z1, Z2,
// K^2 = Z1^2 + Z2^2 referred to chi-square(2). Requires n >= 20.
double dagostino_pvalue(const Eigen::VectorXd& z);

// Sequential testing of score columns at Bonferroni levels level/j; kappa is
// the number of leading rejections before the first acceptance.
SelectionResult select_components(const Eigen::MatrixXd& scores, const SelectionMode& mode);

struct CutoffOptions {
    double level = 0.975;
    int reps = 10000;
    std::uint64_t seed = 0;
    int threads = 1;
};

// Null cutoff by simulation: for each replicate draw an n x p standard
// Gaussian sample, run ICS(Cov, Cov4), apply the selection rule (a replicate
// selecting kappa = 0 falls back to kappa = 1), and pool all per-observation
// squared distances; the returned value is the pooled empirical quantile of
// the requested order. Replicates use substreams (seed, replicate index), so
// the result is a deterministic function of its arguments. Failed replicates
// are skipped; more than 1% of failures aborts.
double monte_carlo_cutoff(int n, int p, const SelectionMode& kappa_rule,
                          const CutoffOptions& opt = {});

struct OutlierReport {
    int kappa = 0;
    bool no_structure = false;
    Eigen::VectorXd distances;
    double cutoff = 0.0;  // +infinity when kappa = 0 (serialized as null)
    std::vector<bool> flags;
    SelectionMode selection_mode;
    CutoffOptions mc_meta;
    std::vector<double> selection_pvalues;
    std::vector<std::string> warnings;
    ICSSolution solution;  // full solution for scree/scores/eigendensity output
};

struct DetectOptions {
    SelectionMode selection = SelectionMode::dagostino();
    CutoffOptions cutoff;
    SpdOptions spd;
};

// Three-step pipeline: ICS(Cov, Cov4) -> component selection -> squared ICS
// distances against the simulated null cutoff.
OutlierReport detect(const CoordinateSample& sample, const DetectOptions& opt = {});
OutlierReport detect(const std::vector<DensitySpline>& sample, const DetectOptions& opt = {});

// Preprocessing-parameter grid sweep: refit each unit's density per cell
// (placement x knot count x lambda), run detection, and record flags; cells
// whose solve fails (typically by conditioning) are recorded as missing, not
// as non-outliers.
struct SweepConfig {
    std::vector<KnotPlacement> placements{KnotPlacement::equally_spaced};
    std::vector<int> knot_counts{6};
    std::vector<double> lambdas{1e-4};
    int degree = 4;
    double interval_pad = 0.01;  // pooled range expanded by this fraction per side
    SelectionMode selection = SelectionMode::fixed(4);
    CutoffOptions cutoff;
    int mpl_max_iter = 100;
    int threads = 1;
};

struct SweepCell {
    KnotPlacement placement;
    int knots = 0;
    double lambda = 0.0;
    bool ok = false;
    std::string error;        // failure reason when !ok
    std::vector<bool> flags;  // per unit, only when ok
};

struct SweepResult {
    std::vector<SweepCell> cells;
    int cells_run = 0;  // number of non-missing cells
    Eigen::VectorXi cells_flagged;  // per unit
    Eigen::VectorXd frequency;      // cells_flagged / cells_run
};

SweepResult param_grid_sweep(const std::vector<Eigen::VectorXd>& unit_samples,
                             const SweepConfig& config);

// JSON document (schema "ics-outlier/1").
std::string to_json(const OutlierReport& report);

} // namespace ics

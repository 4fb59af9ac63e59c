#include "ics/outlier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ics/parallel.hpp"
#include "ics/rng.hpp"

namespace ics {

namespace {

// ICS over a density sample, expressed as the coordinate sample the generic
// machinery consumes: ZB coordinates with the spline-space Gram metric.
CoordinateSample density_coordinates(const std::vector<DensitySpline>& sample) {
    if (sample.empty()) throw DimensionError("detect: empty density sample");
    const SplineSpaceSpec& spec = sample.front().spec;
    const int p = spec.zb_dim();
    Eigen::MatrixXd coords(static_cast<Eigen::Index>(sample.size()), p);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (!sample[i].spec.same_space(spec))
            throw InvalidArgument("detect: density " + std::to_string(i) +
                                  " lives on a different spline space");
        coords.row(static_cast<Eigen::Index>(i)) = sample[i].zb_coords.transpose();
    }
    return CoordinateSample(std::move(coords), GramBasis(gram_zb(spec)));
}

int replicate_kappa(const Eigen::MatrixXd& scores, const SelectionMode& rule) {
    if (rule.kind == SelectionMode::Kind::fixed) return rule.fixed_kappa;
    const SelectionResult sel = select_components(scores, rule);
    // A null replicate that rejects nothing still has to contribute
    // distances; one component is the minimal non-degenerate choice.
    return sel.kappa == 0 ? 1 : sel.kappa;
}

} // namespace

std::string SelectionMode::name() const {
    switch (kind) {
        case Kind::fixed: return "fixed";
        case Kind::scree_data: return "scree_data";
        case Kind::dagostino: return "dagostino";
    }
    return "unknown";
}

Eigen::VectorXd ics_distance(const Eigen::MatrixXd& scores, int kappa) {
    if (kappa < 1 || kappa > scores.cols())
        throw InvalidArgument("ics_distance: kappa = " + std::to_string(kappa) +
                              " out of range [1, " + std::to_string(scores.cols()) + "]");
    return scores.leftCols(kappa).rowwise().squaredNorm();
}

double dagostino_pvalue(const Eigen::VectorXd& z) {
    const auto n_obs = static_cast<int>(z.size());
    if (n_obs < 20)
        throw InvalidArgument("dagostino_pvalue: the K^2 transforms need n >= 20 (got " +
                              std::to_string(n_obs) + ")");
    const double n = n_obs;
    const double mean = z.mean();
    const Eigen::ArrayXd c = z.array() - mean;
    const double m2 = c.square().mean();
    const double m3 = c.cube().mean();
    const double m4 = c.square().square().mean();
    if (!(m2 > 0.0))
        throw InvalidArgument("dagostino_pvalue: sample is constant");

    // Skewness branch: g1 -> Y -> Johnson SU transform Z1.
    const double g1 = m3 / std::pow(m2, 1.5);
    const double y = g1 * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
    const double beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) /
                         ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
    const double delta = 1.0 / std::sqrt(std::log(std::sqrt(w2)));
    const double alpha = std::sqrt(2.0 / (w2 - 1.0));
    const double z1 =
        delta * std::log(y / alpha + std::sqrt((y / alpha) * (y / alpha) + 1.0));

    // Kurtosis branch: b2 -> standardized x -> Wilson-Hilferty-type Z2. The
    // cube root must be the real-valued one; its argument goes negative for
    // heavy-tailed samples.
    const double b2 = m4 / (m2 * m2);
    const double e_b2 = 3.0 * (n - 1.0) / (n + 1.0);
    const double v_b2 =
        24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
    const double x = (b2 - e_b2) / std::sqrt(v_b2);
    const double sb1 = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0)) *
                       std::sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)));
    const double a = 6.0 + 8.0 / sb1 * (2.0 / sb1 + std::sqrt(1.0 + 4.0 / (sb1 * sb1)));
    const double z2 = ((1.0 - 2.0 / (9.0 * a)) -
                       std::cbrt((1.0 - 2.0 / a) / (1.0 + x * std::sqrt(2.0 / (a - 4.0))))) /
                      std::sqrt(2.0 / (9.0 * a));

    // K^2 is chi-square with 2 degrees of freedom under normality, whose
    // survival function is exactly exp(-K^2/2).
    const double k2 = z1 * z1 + z2 * z2;
    return std::exp(-k2 / 2.0);
}

SelectionResult select_components(const Eigen::MatrixXd& scores, const SelectionMode& mode) {
    const int p = static_cast<int>(scores.cols());
    SelectionResult out;
    switch (mode.kind) {
        case SelectionMode::Kind::fixed:
            if (mode.fixed_kappa < 1 || mode.fixed_kappa > p)
                throw InvalidArgument("select_components: fixed kappa = " +
                                      std::to_string(mode.fixed_kappa) + " out of range [1, " +
                                      std::to_string(p) + "]");
            out.kappa = mode.fixed_kappa;
            return out;
        case SelectionMode::Kind::scree_data:
            throw InvalidArgument(
                "select_components: scree_data provides the spectrum for visual inspection "
                "only; choose a fixed kappa for detection");
        case SelectionMode::Kind::dagostino:
            break;
    }
    if (!(mode.level > 0.0 && mode.level < 1.0))
        throw InvalidArgument("select_components: level must lie in (0, 1)");
    // Walk the components in spectral order at Bonferroni levels level/j and
    // stop at the first acceptance.
    for (int j = 0; j < p; ++j) {
        const double pv = dagostino_pvalue(scores.col(j));
        out.pvalues.push_back(pv);
        if (pv < mode.level / static_cast<double>(j + 1))
            out.kappa = j + 1;
        else
            break;
    }
    out.no_structure = (out.kappa == 0);
    return out;
}

double monte_carlo_cutoff(int n, int p, const SelectionMode& kappa_rule,
                          const CutoffOptions& opt) {
    if (n <= p || p < 1)
        throw DimensionError("monte_carlo_cutoff: need n > p >= 1 (got n = " +
                             std::to_string(n) + ", p = " + std::to_string(p) + ")");
    if (opt.reps < 1) throw InvalidArgument("monte_carlo_cutoff: need at least one replicate");
    if (!(opt.level > 0.0 && opt.level < 1.0))
        throw InvalidArgument("monte_carlo_cutoff: level must lie in (0, 1)");
    if (kappa_rule.kind == SelectionMode::Kind::scree_data)
        throw InvalidArgument("monte_carlo_cutoff: scree_data fixes no kappa; use fixed");
    if (kappa_rule.kind == SelectionMode::Kind::fixed &&
        (kappa_rule.fixed_kappa < 1 || kappa_rule.fixed_kappa > p))
        throw InvalidArgument("monte_carlo_cutoff: fixed kappa out of range [1, " +
                              std::to_string(p) + "]");

    std::vector<Eigen::VectorXd> dists(static_cast<std::size_t>(opt.reps));
    std::vector<std::uint8_t> failed(static_cast<std::size_t>(opt.reps), 0);
    std::vector<std::string> errors(static_cast<std::size_t>(opt.reps));
    parallel_for(opt.reps, opt.threads, [&](int r) {
        try {
            auto gen = substream(opt.seed, static_cast<std::uint64_t>(r));
            CoordinateSample cs(normal_matrix(gen, n, p), GramBasis::identity(p));
            const ICSSolution sol = solve_ics(cs);
            dists[static_cast<std::size_t>(r)] =
                ics_distance(sol.scores, replicate_kappa(sol.scores, kappa_rule));
        } catch (const std::exception& e) {
            failed[static_cast<std::size_t>(r)] = 1;
            errors[static_cast<std::size_t>(r)] = e.what();
        }
    });

    int n_failed = 0;
    std::string first_error;
    for (std::size_t r = 0; r < failed.size(); ++r) {
        if (failed[r]) {
            if (first_error.empty()) first_error = errors[r];
            ++n_failed;
        }
    }
    if (static_cast<double>(n_failed) > 0.01 * static_cast<double>(opt.reps))
        throw Error("monte_carlo_cutoff: " + std::to_string(n_failed) + " of " +
                    std::to_string(opt.reps) + " replicates failed (first: " + first_error +
                    ")");

    std::vector<double> pooled;
    pooled.reserve(static_cast<std::size_t>(opt.reps - n_failed) * static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < dists.size(); ++r) {
        if (failed[r]) continue;
        pooled.insert(pooled.end(), dists[r].data(), dists[r].data() + dists[r].size());
    }
    std::sort(pooled.begin(), pooled.end());
    const auto total = static_cast<double>(pooled.size());
    // Smallest pooled value whose empirical distribution function reaches
    // the requested level.
    auto idx = static_cast<std::ptrdiff_t>(std::ceil(opt.level * total - 1e-9)) - 1;
    idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(pooled.size()) - 1);
    return pooled[static_cast<std::size_t>(idx)];
}

OutlierReport detect(const CoordinateSample& sample, const DetectOptions& opt) {
    if (opt.selection.kind == SelectionMode::Kind::scree_data)
        throw InvalidArgument("detect: scree_data fixes no kappa; inspect the spectrum and "
                              "rerun with a fixed kappa");
    ICSSolution sol = solve_ics(sample, WeightFunction::identity(), WeightFunction::cov4(),
                                opt.spd);
    const int n = sample.n();
    const int p = sample.p();

    OutlierReport report{0,
                         false,
                         Eigen::VectorXd::Zero(n),
                         std::numeric_limits<double>::infinity(),
                         std::vector<bool>(static_cast<std::size_t>(n), false),
                         opt.selection,
                         opt.cutoff,
                         {},
                         {},
                         std::move(sol)};

    if (opt.selection.kind == SelectionMode::Kind::fixed) {
        if (opt.selection.fixed_kappa < 1 || opt.selection.fixed_kappa > p)
            throw InvalidArgument("detect: fixed kappa out of range [1, " + std::to_string(p) +
                                  "]");
        report.kappa = opt.selection.fixed_kappa;
    } else {
        const SelectionResult sel = select_components(report.solution.scores, opt.selection);
        report.kappa = sel.kappa;
        report.no_structure = sel.no_structure;
        report.selection_pvalues = sel.pvalues;
    }

    if (report.kappa == 0) {
        report.warnings.push_back(
            "no invariant component rejected normality; nothing was flagged");
        return report;
    }

    report.distances = ics_distance(report.solution.scores, report.kappa);
    report.cutoff = monte_carlo_cutoff(n, p, opt.selection, opt.cutoff);
    for (int i = 0; i < n; ++i)
        report.flags[static_cast<std::size_t>(i)] = report.distances(i) > report.cutoff;
    return report;
}

OutlierReport detect(const std::vector<DensitySpline>& sample, const DetectOptions& opt) {
    return detect(density_coordinates(sample), opt);
}

SweepResult param_grid_sweep(const std::vector<Eigen::VectorXd>& unit_samples,
                             const SweepConfig& config) {
    if (unit_samples.empty()) throw DimensionError("param_grid_sweep: no units");
    if (config.placements.empty() || config.knot_counts.empty() || config.lambdas.empty())
        throw InvalidArgument("param_grid_sweep: empty parameter grid");

    Eigen::Index pooled_size = 0;
    for (const auto& unit : unit_samples) {
        if (unit.size() < 2)
            throw DimensionError("param_grid_sweep: every unit needs at least 2 observations");
        pooled_size += unit.size();
    }
    Eigen::VectorXd pooled(pooled_size);
    Eigen::Index at = 0;
    for (const auto& unit : unit_samples) {
        pooled.segment(at, unit.size()) = unit;
        at += unit.size();
    }
    const double lo = pooled.minCoeff();
    const double hi = pooled.maxCoeff();
    if (!(hi > lo)) throw InvalidArgument("param_grid_sweep: pooled sample is constant");
    const double pad = config.interval_pad * (hi - lo);
    const double a = lo - pad;
    const double b = hi + pad;

    SweepResult result;
    for (KnotPlacement placement : config.placements)
        for (int k : config.knot_counts)
            for (double lambda : config.lambdas)
                result.cells.push_back(SweepCell{placement, k, lambda, false, "", {}});

    const auto n_units = static_cast<int>(unit_samples.size());
    parallel_for(static_cast<int>(result.cells.size()), config.threads, [&](int c) {
        SweepCell& cell = result.cells[static_cast<std::size_t>(c)];
        try {
            const SplineSpaceSpec spec =
                cell.placement == KnotPlacement::equally_spaced
                    ? SplineSpaceSpec::equally_spaced(a, b, config.degree, cell.knots)
                    : SplineSpaceSpec::from_quantiles(a, b, config.degree, cell.knots, pooled);
            MPLConfig fit_config;
            fit_config.spec = spec;
            fit_config.lambda = cell.lambda;
            fit_config.max_iter = config.mpl_max_iter;
            std::vector<DensitySpline> densities;
            densities.reserve(unit_samples.size());
            for (const auto& unit : unit_samples)
                densities.push_back(mpl_fit(unit, fit_config));
            DetectOptions opt;
            opt.selection = config.selection;
            opt.cutoff = config.cutoff;
            const OutlierReport report = detect(densities, opt);
            cell.flags = report.flags;
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
    });

    result.cells_flagged = Eigen::VectorXi::Zero(n_units);
    for (const SweepCell& cell : result.cells) {
        if (!cell.ok) continue;
        ++result.cells_run;
        for (int i = 0; i < n_units; ++i)
            if (cell.flags[static_cast<std::size_t>(i)]) ++result.cells_flagged(i);
    }
    result.frequency = result.cells_run > 0
                           ? (result.cells_flagged.cast<double>() /
                              static_cast<double>(result.cells_run))
                                 .eval()
                           : Eigen::VectorXd::Constant(
                                 n_units, std::numeric_limits<double>::quiet_NaN());
    return result;
}

} // namespace ics

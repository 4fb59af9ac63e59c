#include "ics/pipeline.hpp"

#include <optional>

#include "ics/errors.hpp"
#include "ics/parallel.hpp"

namespace ics {

std::vector<DensitySpline> smooth_grid_sample(const Eigen::VectorXd& t,
                                              const Eigen::MatrixXd& densities,
                                              const SplineSpaceSpec& spec, double lambda_s) {
    spec.validate();
    if (densities.cols() != t.size())
        throw DimensionError("smooth_grid_sample: density columns must match the grid length");
    if (!(lambda_s >= 0.0))
        throw InvalidArgument("smooth_grid_sample: lambda_s must be nonnegative");
    const int q = spec.bspline_dim();
    if (t.size() < q)
        throw DimensionError("smooth_grid_sample: grid too coarse for " + std::to_string(q) +
                             " basis splines");

    const Eigen::MatrixXd design = bspline_design(spec, t);
    Eigen::MatrixXd normal = design.transpose() * design;
    if (lambda_s > 0.0) normal += lambda_s * penalty_matrix(spec, 2);
    normal = ((normal + normal.transpose()) * 0.5).eval();
    const Eigen::MatrixXd root = spd_inv_sqrt(normal);

    const Eigen::VectorXd ints = bspline_integrals(spec);
    const double width = spec.b - spec.a;

    std::vector<DensitySpline> out;
    out.reserve(static_cast<std::size_t>(densities.rows()));
    for (Eigen::Index i = 0; i < densities.rows(); ++i) {
        const Eigen::VectorXd floored = density_floor(densities.row(i).transpose(), t);
        const Eigen::VectorXd y = clr_fn(floored, t);
        Eigen::VectorXd coef = root * (root * (design.transpose() * y));
        coef.array() -= ints.dot(coef) / width;
        out.push_back(DensitySpline{spec, coef.head(q - 1)});
    }
    return out;
}

bool MplRouteResult::all_ok() const {
    for (const auto& e : unit_errors)
        if (!e.empty()) return false;
    return true;
}

MplRouteResult smooth_raw_units(const std::vector<Eigen::VectorXd>& units,
                                const MplRouteOptions& opt) {
    if (units.empty()) throw DimensionError("smooth_raw_units: no units");

    Eigen::Index pooled_size = 0;
    for (const auto& unit : units) pooled_size += unit.size();
    if (pooled_size == 0) throw DimensionError("smooth_raw_units: all units are empty");
    Eigen::VectorXd pooled(pooled_size);
    Eigen::Index at = 0;
    for (const auto& unit : units) {
        pooled.segment(at, unit.size()) = unit;
        at += unit.size();
    }

    double a, b;
    if (opt.interval) {
        a = opt.interval->first;
        b = opt.interval->second;
    } else {
        const double lo = pooled.minCoeff();
        const double hi = pooled.maxCoeff();
        if (!(hi > lo)) throw InvalidArgument("smooth_raw_units: pooled sample is constant");
        const double pad = opt.pad_fraction * (hi - lo);
        a = lo - pad;
        b = hi + pad;
    }

    const SplineSpaceSpec spec =
        opt.placement == KnotPlacement::equally_spaced
            ? SplineSpaceSpec::equally_spaced(a, b, opt.degree, opt.knots)
            : SplineSpaceSpec::from_quantiles(a, b, opt.degree, opt.knots, pooled);

    MPLConfig config;
    config.spec = spec;
    config.lambda = opt.lambda;
    config.penalty_order = opt.penalty_order;
    config.max_iter = opt.max_iter;

    const auto n_units = static_cast<int>(units.size());
    std::vector<std::optional<DensitySpline>> fits(units.size());
    MplRouteResult result{spec, {}, std::vector<MPLReport>(units.size()),
                          std::vector<std::string>(units.size()), };
    parallel_for(n_units, opt.threads, [&](int i) {
        const auto u = static_cast<std::size_t>(i);
        try {
            MPLReport report;
            fits[u] = mpl_fit(units[u], config, &report);
            result.reports[u] = report;
        } catch (const std::exception& e) {
            result.unit_errors[u] = e.what();
        }
    });
    for (auto& fit : fits)
        if (fit) result.densities.push_back(std::move(*fit));
    return result;
}

} // namespace ics
